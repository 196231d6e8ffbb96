use super::{ExprError, ExpressionAst};
use crate::exec::{map_indices, Execution};
use crate::geom::Point3;

/// Samples `f(t, layer_y, 0)` into a wave profile lying in the plane
/// `y = layer_y`: `p_i = (t_i, layer_y, amplitude * f(t_i, layer_y, 0))`
/// with `t_i` uniform over `[t0, t1]`.
pub fn sample_profile(
    ast: &ExpressionAst,
    t_range: (f64, f64),
    samples: usize,
    layer_y: f64,
    amplitude: f64,
) -> Result<Vec<Point3>, ExprError> {
    sample_profile_with(Execution::Auto, ast, t_range, samples, layer_y, amplitude)
}

pub fn sample_profile_with(
    exec: Execution,
    ast: &ExpressionAst,
    (t0, t1): (f64, f64),
    samples: usize,
    layer_y: f64,
    amplitude: f64,
) -> Result<Vec<Point3>, ExprError> {
    if !(t0.is_finite() && t1.is_finite() && t0 < t1) {
        return Err(ExprError::InvalidArgument(format!("t range [{t0}, {t1}] is empty")));
    }
    if samples < 2 {
        return Err(ExprError::InvalidArgument(format!("need at least 2 samples, got {samples}")));
    }
    if !(amplitude > 0.0 && amplitude.is_finite()) {
        return Err(ExprError::InvalidArgument(format!("amplitude must be positive, got {amplitude}")));
    }
    if !layer_y.is_finite() {
        return Err(ExprError::InvalidArgument("layer_y is not finite".into()));
    }
    let step = (t1 - t0) / (samples - 1) as f64;
    let points = map_indices(exec, samples, |i| {
        let t = if i == samples - 1 { t1 } else { t0 + step * i as f64 };
        Point3::new(t, layer_y, amplitude * ast.eval(t, layer_y, 0.0))
    });
    if let Some(bad) = points.iter().find(|p| !p.z.is_finite()) {
        return Err(ExprError::NonFinite(bad.x));
    }
    Ok(points)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_expression_unchecked;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    #[test]
    fn sine_table() {
        let ast = parse_expression_unchecked("sin(x)").unwrap();
        let pts = sample_profile(&ast, (0.0, 2.0 * PI), 9, 0.0, 1.0).unwrap();
        let h = FRAC_1_SQRT_2;
        let expected = [0.0, h, 1.0, h, 0.0, -h, -1.0, -h, 0.0];
        for (p, e) in pts.iter().zip(expected) {
            assert!((p.z - e).abs() < 1e-12, "{} vs {}", p.z, e);
        }
    }

    #[test]
    fn constant_zero_is_flat() {
        let ast = parse_expression_unchecked("0").unwrap();
        let pts = sample_profile(&ast, (-3.0, 7.0), 5, 2.0, 4.0).unwrap();
        assert_eq!(pts.len(), 5);
        assert!(pts.iter().all(|p| p.z == 0.0 && p.y == 2.0));
    }

    #[test]
    fn identity_ramp() {
        let ast = parse_expression_unchecked("x").unwrap();
        let pts = sample_profile(&ast, (0.0, 1.0), 2, 0.0, 1.0).unwrap();
        assert_eq!(pts, vec![Point3::new(0.0, 0.0, 0.0), Point3::new(1.0, 0.0, 1.0)]);
    }

    #[test]
    fn preconditions() {
        let ast = parse_expression_unchecked("x").unwrap();
        assert!(sample_profile(&ast, (1.0, 1.0), 5, 0.0, 1.0).is_err());
        assert!(sample_profile(&ast, (0.0, 1.0), 1, 0.0, 1.0).is_err());
        assert!(sample_profile(&ast, (0.0, 1.0), 5, 0.0, 0.0).is_err());
        let huge = parse_expression_unchecked("x^400").unwrap();
        assert!(matches!(sample_profile(&huge, (0.0, 100.0), 3, 0.0, 1.0), Err(ExprError::NonFinite(_))));
    }

    #[test]
    fn parallel_and_sequential_agree() {
        let ast = parse_expression_unchecked("sin(x)*cos(y) + 0.1x^2").unwrap();
        let a = sample_profile_with(Execution::Sequential, &ast, (-5.0, 5.0), 1000, 0.3, 2.0).unwrap();
        let b = sample_profile_with(Execution::Parallel, &ast, (-5.0, 5.0), 1000, 0.3, 2.0).unwrap();
        assert_eq!(a, b);
    }
}
