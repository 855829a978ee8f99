import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import DOMAINS
from polarization2d.config import (DomainConfig, RunConfig, load_domain, parse_domain,
                                   parse_run, serialize_domain, serialize_run)
from polarization2d.errors import ConfigError
from polarization2d.geometry import Ellipse, FourierCurve, Kite, Star


def test_parse_ellipse_with_comments():
    cfg = parse_domain("# test\nkind = ellipse\na = 2   # long axis\nb = 1\n\ncenter = 1, -2\n")
    assert cfg.kind == "ellipse" and cfg.n == 256
    assert cfg.curve() == Ellipse(2.0, 1.0, 0.0, (1.0, -2.0))


def test_kinds_build_curves():
    assert isinstance(DomainConfig.make("kite").curve(), Kite)
    assert DomainConfig.make("star", fold=5, amp=0.2).curve() == Star(1.0, 0.2, 5)
    assert DomainConfig.make("circle", radius=0.5).curve() == Ellipse(0.5, 0.5)
    c = DomainConfig.make("custom", x_cos=(0, 1), x_sin=(0,), y_cos=(0,), y_sin=(0, 1)).curve()
    assert isinstance(c, FourierCurve)


@pytest.mark.parametrize("path", sorted(DOMAINS.glob("*.cfg")))
def test_shipped_domains_round_trip(path):
    cfg = load_domain(path)
    assert parse_domain(serialize_domain(cfg)) == cfg
    cfg.curve()


@pytest.mark.parametrize("text, line, key", [
    ("kind = ellipse\na = 2\nb = x\n", 3, "b"),
    ("kind = ellipse\na = 2\nb = 1\nfold = 3\n", 4, "fold"),
    ("kind = blob\n", 1, "kind"),
    ("kind = kite\nscale\n", 2, None),
    ("kind = kite\nn = 15\n", 2, "n"),
    ("kind = kite\nscale = 1\nscale = 2\n", 3, "scale"),
    ("kind = ellipse\ncenter = 1, 2, 3\na = 1\nb = 1\n", 2, "center"),
    ("kind = star\nfold = 2.5\n", 2, "fold"),
])
def test_errors_cite_line_and_key(text, line, key):
    with pytest.raises(ConfigError) as exc:
        parse_domain(text)
    assert exc.value.line == line and exc.value.key == key
    assert f"line {line}" in str(exc.value)


def test_missing_keys():
    with pytest.raises(ConfigError, match="kind"):
        parse_domain("a = 1\n")
    with pytest.raises(ConfigError) as exc:
        parse_domain("kind = ellipse\na = 1\n")
    assert exc.value.key == "b"
    with pytest.raises(ConfigError):
        parse_domain("kind = ellipse\na = -1\nb = 1\n")
    with pytest.raises(ConfigError):
        load_domain("/nonexistent/domain.cfg")


@settings(max_examples=50, deadline=None)
@given(a=st.floats(0.01, 100), b=st.floats(0.01, 100), phi=st.floats(-10, 10),
       cx=st.floats(-1e3, 1e3), n=st.integers(8, 512).map(lambda k: 2 * k))
def test_domain_round_trip_property(a, b, phi, cx, n):
    cfg = DomainConfig.make("ellipse", n=n, a=a, b=b, phi=phi, center=(cx, -cx))
    assert parse_domain(serialize_domain(cfg)) == cfg


@settings(max_examples=50, deadline=None)
@given(command=st.sampled_from(["compute", "sweep", "hs-check"]),
       mu=st.sampled_from(["", "1", "1+1j", "-0.5,2"]), n=st.integers(0, 1024),
       guard=st.floats(1e-12, 1e-2), strict=st.booleans(),
       fmt=st.sampled_from(["csv", "json", "plot-data"]))
def test_run_config_round_trip(command, mu, n, guard, strict, fmt):
    cfg = RunConfig(command, domain="domains/kite.cfg", mu=mu, n=n, guard=guard,
                    strict=strict, format=fmt)
    assert parse_run(serialize_run(cfg)) == cfg


def test_run_config_errors():
    with pytest.raises(ConfigError):
        parse_run("domain = x\n")
    with pytest.raises(ConfigError) as exc:
        parse_run("command = compute\nstrict = maybe\n")
    assert exc.value.key == "strict"
    with pytest.raises(ConfigError):
        parse_run("command = compute\ncolour = red\n")
