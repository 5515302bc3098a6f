//! Reference computations independent of the library's code paths.
#![allow(dead_code, clippy::excessive_precision)]

use num_complex::Complex64;
use std::f64::consts::PI;

const GK_NODES: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
const K15_WEIGHTS: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const G7_WEIGHTS: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

fn gk15(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kronrod = K15_WEIGHTS[7] * fc;
    let mut gauss = G7_WEIGHTS[3] * fc;
    for i in 0..7 {
        let x = h * GK_NODES[i];
        let pair = f(c - x) + f(c + x);
        kronrod += K15_WEIGHTS[i] * pair;
        if i % 2 == 1 {
            gauss += G7_WEIGHTS[i / 2] * pair;
        }
    }
    (kronrod * h, ((kronrod - gauss) * h).abs())
}

/// Adaptive Gauss–Kronrod (7/15) quadrature to absolute tolerance `tol`.
pub fn integrate(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn recurse(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64, depth: u32) -> f64 {
        let (value, err) = gk15(f, a, b);
        if err <= tol || depth >= 40 {
            return value;
        }
        let m = 0.5 * (a + b);
        recurse(f, a, m, 0.5 * tol, depth + 1) + recurse(f, m, b, 0.5 * tol, depth + 1)
    }
    // pre-split so oscillatory integrands start with resolved panels
    let panels = 64;
    let h = (b - a) / panels as f64;
    (0..panels)
        .map(|k| recurse(f, a + k as f64 * h, a + (k + 1) as f64 * h, tol / panels as f64, 0))
        .sum()
}

/// `∫₀^L √(2/L) sin(nπx/L) · √(2/L') sin(mπx/L') dx` by quadrature.
pub fn box_overlap_quadrature(n: u32, length: f64, m: u32, expanded: f64) -> f64 {
    let norm = (2.0 / length).sqrt() * (2.0 / expanded).sqrt();
    let k1 = n as f64 * PI / length;
    let k2 = m as f64 * PI / expanded;
    integrate(&|x: f64| norm * (k1 * x).sin() * (k2 * x).sin(), 0.0, length, 1e-14)
}

/// Coherent-state inner product `⟨β|α⟩ = exp(−|β|²/2 − |α|²/2 + β̄α)`.
pub fn coherent_inner_closed_form(beta: Complex64, alpha: Complex64) -> Complex64 {
    (-0.5 * beta.norm_sqr() - 0.5 * alpha.norm_sqr() + beta.conj() * alpha).exp()
}

/// `|⟨α−δ|α⟩| = exp(−|δ|²/2)`
pub fn visibility_closed_form(delta: Complex64) -> f64 {
    (-0.5 * delta.norm_sqr()).exp()
}

#[cfg(test)]
mod self_checks {
    #[allow(unused_imports)]
    use super::*;

    #[test]
    fn quadrature_integrates_known_functions() {
        assert!((integrate(&|x: f64| x.sin(), 0.0, PI, 1e-14) - 2.0).abs() < 1e-13);
        assert!((integrate(&|x: f64| (-x * x).exp(), -8.0, 8.0, 1e-14) - PI.sqrt()).abs() < 1e-13);
    }
}
