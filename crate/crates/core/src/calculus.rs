//! Residuals of the discrete product rule and the integration by parts
//! formula `Σ_x Δf(x) g(x) μ(x) = −½ Σ_{x,y} (∇_xy f)(∇_xy g) ω(x, y)`.

use crate::error::{Error, Result};
use crate::graph::{difference, laplacian_unchecked, VertexField, WeightedGraph};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdentityReport {
    /// `Σ_x Δf(x) g(x) μ(x)`.
    pub ibp_lhs: f64,
    /// `−½ Σ_{x,y} (∇_xy f)(∇_xy g) ω(x, y)`.
    pub ibp_rhs: f64,
    /// `|lhs − rhs|`.
    pub ibp_abs: f64,
    /// `|lhs − rhs|` divided by `max(1, Σ |terms|)`.
    pub residual_ibp: f64,
    /// Max over ordered edges of `|∇(fg) − f(x)∇g − (∇f) g(y)|`.
    pub residual_product: f64,
}

/// Residuals of both identities for `f` and `g`.
///
/// One of the two fields must vanish on the halo so that every sum is exact
/// on the truncation.
pub fn calculus_identities(graph: &WeightedGraph, f: &VertexField, g: &VertexField) -> Result<IdentityReport> {
    calculus_identities_with(graph, f, g, laplacian_unchecked)
}

/// As [`calculus_identities`], with the Laplacian supplied by the caller.
/// Used to confirm that the identity check catches a broken operator.
pub fn calculus_identities_with(
    graph: &WeightedGraph,
    f: &VertexField,
    g: &VertexField,
    operator: impl Fn(&WeightedGraph, &VertexField, usize) -> f64,
) -> Result<IdentityReport> {
    graph.check_field(f)?;
    graph.check_field(g)?;
    if !f.supported_away_from_halo(graph) && !g.supported_away_from_halo(graph) {
        return Err(Error::UnsupportedInput);
    }

    let mut lhs = 0.0;
    let mut scale = 0.0;
    for x in 0..graph.len() {
        if g[x] == 0.0 {
            continue;
        }
        let term = operator(graph, f, x) * g[x] * graph.measure(x);
        lhs += term;
        scale += term.abs();
    }

    let mut pair_sum = 0.0;
    let mut product = 0.0f64;
    for x in 0..graph.len() {
        for nb in graph.neighbors(x) {
            let y = nb.vertex;
            let df = difference(f, x, y);
            let dg = difference(g, x, y);
            let term = df * dg * nb.weight;
            pair_sum += term;
            scale += 0.5 * term.abs();

            let dfg = f[y] * g[y] - f[x] * g[x];
            product = product.max((dfg - f[x] * dg - df * g[y]).abs());
        }
    }
    let rhs = -0.5 * pair_sum;
    let ibp_abs = (lhs - rhs).abs();
    Ok(IdentityReport {
        ibp_lhs: lhs,
        ibp_rhs: rhs,
        ibp_abs,
        residual_ibp: ibp_abs / scale.max(1.0),
        residual_product: product,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{build_model_tree, ModelTreeSpec};

    #[test]
    fn root_indicator_on_binary_tree() {
        let g = build_model_tree(&ModelTreeSpec::new(2, 3, 1.0)).unwrap();
        let f = VertexField::indicator(g.len(), 0);
        let r = calculus_identities(&g, &f, &f).unwrap();
        assert_eq!(r.ibp_lhs, -2.0);
        assert_eq!(r.ibp_rhs, -2.0);
        assert_eq!(r.residual_ibp, 0.0);
        assert_eq!(r.residual_product, 0.0);
    }

    #[test]
    fn zero_field() {
        let g = build_model_tree(&ModelTreeSpec::new(2, 3, 1.0)).unwrap();
        let f = VertexField::zeros(g.len());
        let h = VertexField::from_fn(g.len(), |x| x as f64);
        let r = calculus_identities(&g, &f, &h).unwrap();
        assert_eq!(r.ibp_abs, 0.0);
        assert_eq!(r.residual_product, 0.0);
    }

    #[test]
    fn halo_supported_fields_are_refused() {
        let g = build_model_tree(&ModelTreeSpec::new(2, 2, 1.0)).unwrap();
        let f = VertexField::constant(g.len(), 1.0);
        assert_eq!(calculus_identities(&g, &f, &f), Err(Error::UnsupportedInput));
    }

    #[test]
    fn negated_operator_is_detected() {
        let g = build_model_tree(&ModelTreeSpec::new(2, 3, 1.0)).unwrap();
        let f = VertexField::indicator(g.len(), 0);
        let r = calculus_identities_with(&g, &f, &f, |g, f, x| -laplacian_unchecked(g, f, x)).unwrap();
        assert!(r.residual_ibp > 0.5);
    }
}
