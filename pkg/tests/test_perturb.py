# tests/test_perturb.py
import numpy as np
import pytest

from core.errors import ConfigError, ExprError
from modules.datagen import FAMILY_NAMES, FamilySpec
from symbolic.canon import equivalent
from symbolic.expr import PLACEHOLDER, Const, Equation, Int, Var, add, d, mul, sub, walk
from symbolic.parser import parse_expr, parse_infix
from symbolic.perturb import (
    PerturbConfig, derive_seed, inject_noise_term, mask_coefficients, perturb_many, swap_branches, symbolic_setting,
)
from symbolic.tokens import from_tokens, to_canonical_tokens, to_manual_tokens


def _placeholders(eq):
    return sum(1 for node in walk(eq.residual) if node == PLACEHOLDER)


def test_swap_probability_extremes():
    tree = add(Var("x"), Var("y"))
    assert swap_branches(tree, PerturbConfig(swap_prob=0.0)) == tree
    assert swap_branches(tree, PerturbConfig(swap_prob=1.0)) == add(Var("y"), Var("x"))


def test_subtraction_rewritten_as_addition():
    swapped = swap_branches(sub(Var("x"), Var("y")), PerturbConfig(swap_prob=1.0))
    assert swapped == add(mul(Int(-1), Var("y")), Var("x"))


def test_swap_frequency():
    tree = add(Var("x"), Var("y"))
    cfg = PerturbConfig(swap_prob=0.5)
    swapped = sum(swap_branches(tree, cfg, np.random.default_rng(seed)) != tree for seed in range(2000))
    # 3 сигмы биномиального разброса
    assert abs(swapped / 2000 - 0.5) < 3 * np.sqrt(0.25 / 2000)


@pytest.mark.parametrize("family", FAMILY_NAMES)
def test_canonical_tokens_ignore_branch_order(family):
    eq = FamilySpec.from_settings(family).law().to_equation()
    expected = to_canonical_tokens(eq)
    cfg = PerturbConfig(swap_prob=0.5)
    for seed in range(1000):
        perturbed = swap_branches(eq.residual, cfg, np.random.default_rng(seed))
        assert to_canonical_tokens(perturbed) == expected


def test_nary_permutation_keeps_meaning():
    e = parse_expr("u_t + 0.5*u*u_x - 0.01*u_xx + x*t*u")
    cfg = PerturbConfig(swap_prob=1.0, permute_nary=True)
    for seed in range(20):
        assert equivalent(swap_branches(e, cfg, np.random.default_rng(seed)), e)


def test_swap_is_deterministic():
    e = parse_expr("u_t + 0.5*u*u_x - 0.01*u_xx")
    cfg = PerturbConfig(swap_prob=0.5, seed=3)
    assert swap_branches(e, cfg) == swap_branches(e, cfg)


def test_noise_injection():
    eq = parse_infix("u_t + 0.5*u*u_x = 0")
    cfg = PerturbConfig(noise_prob=1.0, seed=11)
    noisy, provenance = inject_noise_term(eq, cfg)
    assert provenance.injected
    assert provenance.term in cfg.noise_term_library
    assert 0.1 <= provenance.coefficient <= 1.0
    assert provenance.coefficient == float(f"{provenance.coefficient:.3g}")
    assert noisy.residual == add(eq.residual, mul(Const(provenance.coefficient), provenance.term))
    assert provenance.to_json()["coefficient"] == provenance.coefficient


def test_noise_probability_zero():
    eq = parse_infix("u_t + 0.5*u*u_x = 0")
    noisy, provenance = inject_noise_term(eq, PerturbConfig(noise_prob=0.0))
    assert noisy == eq
    assert provenance.to_json() is None


def test_noise_frequency_and_provenance():
    eq = parse_infix("u_t + 0.5*u*u_x - 0.01*u_xx = 0")
    cfg = PerturbConfig(noise_prob=0.5)
    fired = 0
    for seed in range(1000):
        noisy, provenance = inject_noise_term(eq, cfg, np.random.default_rng(seed))
        fired += provenance.injected
        assert provenance.injected == (not equivalent(noisy, eq)), f"seed={seed}"
    assert 0.46 <= fired / 1000 <= 0.54


def test_viscous_noise_on_inviscid_burgers():
    eq = FamilySpec.from_settings("inviscid_burgers").law().to_equation()
    cfg = PerturbConfig(noise_prob=1.0, noise_term_library=(d("x", 2),), seed=7)
    noisy, provenance = inject_noise_term(eq, cfg)
    assert provenance.term == d("x", 2)
    assert noisy.residual == add(eq.residual, mul(Const(provenance.coefficient), d("x", 2)))
    text = to_canonical_tokens(from_tokens(to_canonical_tokens(noisy))).text()
    assert text.count("∂ ( u(x,t) , ( x , 2 ) )") == 1


def test_noise_on_zero_residual():
    with pytest.raises(ExprError):
        inject_noise_term(Equation(Int(0)), PerturbConfig(noise_prob=1.0))


def test_mask_burgers():
    eq = parse_infix("u_t + 0.5*u*u_x - 0.01*u_xx = 0")
    assert _placeholders(mask_coefficients(eq)) == 2
    assert _placeholders(mask_coefficients(eq, include_unit=True)) == 3


def test_mask_hides_integer_coefficients():
    eq = parse_infix("u_t + 2*u_xx = 0")
    assert mask_coefficients(eq).residual == add(d("t"), mul(PLACEHOLDER, d("x", 2)))


def test_mask_keeps_sign_from_subtraction_rewrite():
    residual = parse_infix("u_t - 0.5*u_x = 0").residual
    swapped = swap_branches(residual, PerturbConfig(swap_prob=1.0))
    masked = mask_coefficients(Equation(swapped)).residual
    assert masked == add(mul(Int(-1), mul(d("x"), PLACEHOLDER)), d("t"))


def test_mask_with_unit_terms_canonical_display():
    eq = parse_infix("u_t + 0.955*cos(u)*u_x = 0")
    seq = to_canonical_tokens(mask_coefficients(eq, include_unit=True))
    assert seq.text() == "+ × [?] cos u(x,t) ∂ ( u(x,t) , x ) × [?] ∂ ( u(x,t) , t )"


def test_symbolic_settings():
    eq = parse_infix("u_t + 0.5*u*u_x - 0.01*u_xx = 0")
    cfg = PerturbConfig(swap_prob=0.5, noise_prob=1.0, seed=5)
    assert symbolic_setting(eq, "manual", cfg)[0] == to_manual_tokens(eq)
    assert symbolic_setting(eq, "canonical", cfg)[0] == to_canonical_tokens(eq)

    swapped, provenance = symbolic_setting(eq, "swapping", cfg)
    assert not provenance.injected
    assert equivalent(from_tokens(swapped), eq)

    noisy, provenance = symbolic_setting(eq, "noisy_canonical", cfg)
    assert provenance.injected
    assert noisy != to_canonical_tokens(eq)

    with pytest.raises(ConfigError):
        symbolic_setting(eq, "shuffled", cfg)


@pytest.mark.parametrize("kwargs", [
    {"swap_prob": 1.5},
    {"noise_prob": -0.1},
    {"noise_coeff_range": (1.0, 0.1)},
    {"noise_term_library": ()},
])
def test_config_validation(kwargs):
    with pytest.raises(ConfigError):
        PerturbConfig(**kwargs)


def test_config_from_settings_overrides():
    cfg = PerturbConfig.from_settings(swap_prob=0.25, noise_prob=None)
    assert cfg.swap_prob == 0.25
    assert cfg.noise_prob == 0.5
    assert parse_expr("u*u_x") in cfg.noise_term_library


def test_perturb_many_uses_independent_seeds():
    eqs = [parse_infix("u_t + 0.5*u*u_x - 0.01*u_xx = 0")] * 3
    cfg = PerturbConfig(seed=1)
    result = perturb_many(eqs, cfg)
    assert result == perturb_many(eqs, cfg)
    assert derive_seed(1, 0) != derive_seed(1, 1)
    assert all(equivalent(r, eqs[0]) for r in result)
