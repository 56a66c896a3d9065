import pytest

from lcsreduce.scene import SceneError, bundled_scenes, load_scene, loads

BASE = """\
[chart M]
coords = x1, y1, x2, y2

[lcs main]
chart = M
omega = exp(y2)*(dx1^dy1 + dx2^dy2)
"""


def test_bundled_darboux():
    s = load_scene("darboux_hypersurface.scene")
    assert len(s.charts) == 1 and len(s.lcs_forms) == 1
    assert len(s.submanifolds) == 1 and len(s.foliations) == 1
    assert str(s.structures["main"].lee) == "dy1"
    assert s.foliations["F"].chart is s.submanifolds["Q"].source


@pytest.mark.parametrize("name", bundled_scenes())
def test_all_bundled_load(name):
    assert load_scene(name).summary()


def test_undeclared_variable():
    with pytest.raises(SceneError) as err:
        loads(BASE.replace("exp(y2)", "exp(z)"))
    assert err.value.line == 6 and "z" in str(err.value)


def test_empty_file():
    with pytest.raises(SceneError, match="empty"):
        loads("")
    with pytest.raises(SceneError, match="empty"):
        loads("# only a comment\n\n")


def test_continuation_and_comments():
    text = BASE.replace("omega = exp(y2)*(dx1^dy1 + dx2^dy2)",
                        "omega = exp(y2)*(dx1^dy1\n    + dx2^dy2)  # trailing")
    assert str(loads(text).structures["main"].lee) == "dy2"


def test_not_lcs_eager_vs_lazy():
    bad = BASE.replace("exp(y2)*(dx1^dy1 + dx2^dy2)", "dx1^dy1 + x1*dx2^dy2 + dy1^dy2")
    with pytest.raises(SceneError, match="NotLCS"):
        loads(bad)
    assert "main" not in loads(bad, eager=False).structures


@pytest.mark.parametrize("text,needle", [
    ("[chart]\ncoords = x\n", "needs a name"),
    ("[widget W]\n", "unknown section"),
    ("coords = x\n", "outside"),
    ("[chart M]\ncoords = x, y\ncoords = x\n", "duplicate"),
    ("[chart M]\ncoords = x, y\nshape = round\n", "unknown key"),
    ("[chart M]\n", "missing"),
    ("[chart M]\ncoords = x, y\n[chart M]\ncoords = a, b\n", "already used"),
    (BASE + "[foliation F]\nchart = N\nleaves = y1\n", "unknown chart"),
    (BASE + "[submanifold Q]\nchart = M\ncoords = y1, x2, y2\ncomponents = 0, y1, x2\n",
     "3 components"),
    ("[chart M]\ncoords = x, y\n[sample]\nsamples = many\n", "number"),
])
def test_errors(text, needle):
    with pytest.raises(SceneError, match=needle):
        loads(text)


def test_error_location():
    with pytest.raises(SceneError) as err:
        loads(BASE + "[foliation F]\nchart = M\nleaves = q\n")
    assert err.value.line == 9
    assert str(err.value).startswith("<scene>:9:")


def test_contraction_validation():
    text = ("[chart R]\ncoords = x, y\n[foliation V]\nchart = R\nleaves = y\n"
            "[contraction C]\nfoliation = V\ncomponents = x + (1 - t)*y, t*y\nslice = y = 0\n")
    with pytest.raises(SceneError, match="leaf preserved"):
        loads(text)


def test_sample_block():
    s = loads(BASE + "[sample]\nsamples = 7\nseed = 3\ntol = 1e-8\n")
    assert (s.plan.samples, s.plan.seed, s.plan.tol) == (7, 3, 1e-8)


def test_missing_file():
    with pytest.raises(FileNotFoundError):
        load_scene("/nonexistent/nothing.scene")
