//! Quadrature rules on triangles (barycentric points, weights relative to
//! the area) and on segments (points in `[0, 1]`, weights relative to the
//! length).

/// A triangle rule: `(barycentric, weight)` with weights summing to 1.
pub type TriangleRule = Vec<([f64; 3], f64)>;

/// A segment rule: `(t, weight)` with weights summing to 1.
pub type SegmentRule = Vec<(f64, f64)>;

/// 7-point rule exact for polynomials of degree 5.
pub fn triangle_degree5() -> TriangleRule {
    let s15 = 15f64.sqrt();
    let a = (6.0 - s15) / 21.0;
    let b = (6.0 + s15) / 21.0;
    let wa = (155.0 - s15) / 1200.0;
    let wb = (155.0 + s15) / 1200.0;
    let mut rule = vec![([1.0 / 3.0; 3], 9.0 / 40.0)];
    for (p, w) in [(a, wa), (b, wb)] {
        let q = 1.0 - 2.0 * p;
        rule.push(([q, p, p], w));
        rule.push(([p, q, p], w));
        rule.push(([p, p, q], w));
    }
    rule
}

/// 12-point rule exact for polynomials of degree 6.
pub fn triangle_degree6() -> TriangleRule {
    let mut rule = Vec::with_capacity(12);
    for (a, b, w) in [
        (0.501426509658179, 0.249286745170910, 0.116786275726379),
        (0.873821971016996, 0.063089014491502, 0.050844906370207),
    ] {
        rule.push(([a, b, b], w));
        rule.push(([b, a, b], w));
        rule.push(([b, b, a], w));
    }
    let (a, b, c, w) = (
        0.053145049844817,
        0.310352451033784,
        0.636502499121399,
        0.082851075618374,
    );
    for p in [[a, b, c], [a, c, b], [b, a, c], [b, c, a], [c, a, b], [c, b, a]] {
        rule.push((p, w));
    }
    rule
}

/// 5-point Gauss–Legendre rule on `[0, 1]`.
pub fn segment_gauss5() -> SegmentRule {
    let nodes = [
        (0.0, 0.568_888_888_888_888_9),
        (0.538_469_310_105_683_1, 0.478_628_670_499_366_5),
        (0.906_179_845_938_664, 0.236_926_885_056_189_1),
    ];
    let mut rule = vec![(0.5, 0.5 * nodes[0].1)];
    for &(x, w) in &nodes[1..] {
        rule.push((0.5 * (1.0 - x), 0.5 * w));
        rule.push((0.5 * (1.0 + x), 0.5 * w));
    }
    rule
}

#[cfg(test)]
mod tests {
    use super::*;

    fn integrate(rule: &TriangleRule, p: u32, q: u32) -> f64 {
        // Reference triangle (0,0), (1,0), (0,1); area 1/2.
        rule.iter()
            .map(|(b, w)| 0.5 * w * b[1].powi(p as i32) * b[2].powi(q as i32))
            .sum()
    }

    fn exact(p: u32, q: u32) -> f64 {
        // ∫ x^p y^q over the reference triangle = p! q! / (p + q + 2)!
        let f = |n: u32| (1..=n).map(f64::from).product::<f64>();
        f(p) * f(q) / f(p + q + 2)
    }

    #[test]
    fn weights_sum_to_one() {
        for rule in [triangle_degree5(), triangle_degree6()] {
            assert!((rule.iter().map(|r| r.1).sum::<f64>() - 1.0).abs() < 1e-12);
            assert!(rule.iter().all(|(b, _)| (b.iter().sum::<f64>() - 1.0).abs() < 1e-12));
        }
        assert!((segment_gauss5().iter().map(|r| r.1).sum::<f64>() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn polynomial_exactness() {
        for (rule, deg) in [(triangle_degree5(), 5), (triangle_degree6(), 6)] {
            for p in 0..=deg {
                for q in 0..=deg - p {
                    assert!(
                        (integrate(&rule, p, q) - exact(p, q)).abs() < 1e-13,
                        "degree {deg}: {p} {q}"
                    );
                }
            }
        }
        let g = segment_gauss5();
        for k in 0..10 {
            let v: f64 = g.iter().map(|(t, w)| w * t.powi(k)).sum();
            assert!((v - 1.0 / (k as f64 + 1.0)).abs() < 1e-14);
        }
    }
}
