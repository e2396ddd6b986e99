//! Epsilon-convexity on uniform grids.
//!
//! A function `f` on an interval is eps-convex when `f(m) - eps * m^2 / 2` is
//! convex. Its eps-convex hull is the largest eps-convex minorant, computed
//! here through the shift identity
//!
//! ```text
//! [f]_eps = conv(f - eps m^2 / 2) + eps m^2 / 2
//! ```
//!
//! so a single lower-hull routine serves every curvature, `eps = 0` included.

use crate::error::{invalid, Error, Result};
use crate::grid::GridFunction;

/// Nodes lying within this relative distance above the lower hull keep their
/// input value. This makes the hull idempotent bit-for-bit.
const SNAP_REL: f64 = 1e-13;

/// Default relative tolerance for cluster/exposed classification.
pub const DEFAULT_CONTACT_REL: f64 = 1e-12;

/// Indices of the vertices of the lower convex hull of `(i, values[i])`.
///
/// Andrew's monotone chain restricted to the lower chain. Points are already
/// sorted by abscissa; collinear points are dropped, so consecutive vertex
/// slopes are strictly increasing.
pub(crate) fn lower_hull(values: &[f64]) -> Vec<usize> {
    let mut hull: Vec<usize> = Vec::with_capacity(values.len());
    for (k, &vk) in values.iter().enumerate() {
        while hull.len() >= 2 {
            let o = hull[hull.len() - 2];
            let a = hull[hull.len() - 1];
            // cross((a - o), (k - o)) with integer abscissae
            let cross = (a - o) as f64 * (vk - values[o]) - (k - o) as f64 * (values[a] - values[o]);
            if cross <= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(k);
    }
    hull
}

fn check_eps(eps: f64) -> Result<()> {
    if eps.is_finite() && eps >= 0.0 {
        Ok(())
    } else {
        Err(invalid("eps", format!("must be finite and >= 0, got {eps}")))
    }
}

fn shift(f: &GridFunction, eps: f64) -> Vec<f64> {
    if eps == 0.0 {
        vec![0.0; f.len()]
    } else {
        f.nodes().map(|m| 0.5 * eps * m * m).collect()
    }
}

/// Lower convex envelope of the piecewise-linear interpolant of `f`, sampled
/// at the nodes of `f`.
pub fn convex_hull(f: &GridFunction) -> GridFunction {
    hull_with_shift(f, 0.0)
}

/// The eps-convex hull of `f`; `eps = 0` gives [`convex_hull`] exactly.
pub fn eps_convex_hull(f: &GridFunction, eps: f64) -> Result<GridFunction> {
    check_eps(eps)?;
    Ok(hull_with_shift(f, eps))
}

fn hull_with_shift(f: &GridFunction, eps: f64) -> GridFunction {
    let q = shift(f, eps);
    let shifted: Vec<f64> = f.values().iter().zip(&q).map(|(v, s)| v - s).collect();
    let qmax = q.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let tol = SNAP_REL * (1.0 + f.max_abs() + qmax);

    let verts = lower_hull(&shifted);
    let mut out = f.values().to_vec();
    for w in verts.windows(2) {
        let (a, b) = (w[0], w[1]);
        let (va, vb) = (shifted[a], shifted[b]);
        let span = (b - a) as f64;
        for j in a + 1..b {
            let chord = va + (vb - va) * ((j - a) as f64 / span);
            if shifted[j] - chord > tol {
                out[j] = chord + q[j];
            }
        }
    }
    f.with_values(out).expect("hull keeps the grid")
}

/// Grid test for eps-convexity: every interior second difference satisfies
/// `f[i-1] - 2 f[i] + f[i+1] >= eps h^2 - tol`.
///
/// On a uniform grid this is equivalent to requiring the graph to lie below
/// every eps-parabola chord between nodes.
pub fn is_eps_convex(f: &GridFunction, eps: f64, tol: f64) -> bool {
    worst_eps_deficit(f, eps).is_none_or(|(_, d)| d <= tol)
}

/// Largest violation `eps h^2 - d2` over interior nodes, with its node.
pub fn worst_eps_deficit(f: &GridFunction, eps: f64) -> Option<(usize, f64)> {
    let h2 = f.h() * f.h();
    let v = f.values();
    (1..f.n())
        .map(|i| (i, eps * h2 - (v[i - 1] - 2.0 * v[i] + v[i + 1])))
        .max_by(|a, b| a.1.total_cmp(&b.1))
}

/// The quadratic with second derivative `eps` through `(m1, y1)` and `(m2, y2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpsParabola {
    pub eps: f64,
    pub m1: f64,
    pub y1: f64,
    pub m2: f64,
    pub y2: f64,
}

impl EpsParabola {
    pub fn new(eps: f64, (m1, y1): (f64, f64), (m2, y2): (f64, f64)) -> Result<Self> {
        check_eps(eps)?;
        if !(m1 < m2) {
            return Err(invalid("m1", format!("need m1 < m2, got {m1} >= {m2}")));
        }
        Ok(Self { eps, m1, y1, m2, y2 })
    }

    pub fn eval(&self, s: f64) -> f64 {
        let w = self.m2 - self.m1;
        self.y1 * (self.m2 - s) / w + self.y2 * (s - self.m1) / w
            - 0.5 * self.eps * (self.m2 - s) * (s - self.m1)
    }
}

/// Replaces `f` strictly between nodes `i1` and `i2` by the eps-parabola
/// through `(node(i1), f[i1])` and `(node(i2), f[i2])`.
///
/// The result is again eps-convex.
pub fn parabola_splice(f: &GridFunction, i1: usize, i2: usize, eps: f64) -> Result<GridFunction> {
    check_eps(eps)?;
    if !(i1 < i2 && i2 <= f.n()) {
        return Err(invalid(
            "i2",
            format!("need i1 < i2 <= {}, got ({i1}, {i2})", f.n()),
        ));
    }
    let tol = 1e-10 * f.max_abs().max(1.0) * f.h() * f.h();
    if let Some((index, deficit)) = worst_eps_deficit(f, eps).filter(|(_, d)| *d > tol) {
        return Err(Error::NotEpsConvex { eps, index, deficit });
    }
    let p = EpsParabola::new(eps, (f.node(i1), f.get(i1)), (f.node(i2), f.get(i2)))?;
    let mut out = f.values().to_vec();
    for (j, v) in out.iter_mut().enumerate().take(i2).skip(i1 + 1) {
        *v = p.eval(f.node(j));
    }
    f.with_values(out)
}

/// Partition of the grid nodes of a potential into cluster intervals and
/// exposed nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct ClusterDecomposition {
    /// Maximal cluster intervals as `(a, b)`: nodes strictly between `a` and
    /// `b` are cluster nodes, `a` and `b` themselves are exposed.
    pub clusters: Vec<(usize, usize)>,
    /// Exposed nodes in increasing order. Always contains both end nodes.
    pub exposed: Vec<usize>,
    /// Contact tolerance used for the classification.
    pub tol: f64,
    nodes: usize,
}

impl ClusterDecomposition {
    pub fn node_count(&self) -> usize {
        self.nodes
    }

    /// `mask[i]` is true for exposed nodes.
    pub fn exposed_mask(&self) -> Vec<bool> {
        let mut mask = vec![false; self.nodes];
        for &i in &self.exposed {
            mask[i] = true;
        }
        mask
    }

    pub fn cluster_nodes(&self) -> impl Iterator<Item = usize> + '_ {
        self.clusters.iter().flat_map(|&(a, b)| a + 1..b)
    }

    pub fn is_empty(&self) -> bool {
        self.clusters.is_empty()
    }
}

/// Default contact tolerance for a potential: `1e-12 * max(1, |psi|_inf)`.
pub fn default_contact_tol(psi: &GridFunction) -> f64 {
    DEFAULT_CONTACT_REL * psi.max_abs().max(1.0)
}

/// Classifies every node of `psi` as a cluster node or an exposed node.
///
/// With `hull = [psi]_eps`, interior node `i` is a cluster node when either
/// `psi` lies above the hull there by more than `tol`, or the hull is in
/// contact (within `tol`) with the eps-parabola through its two neighbours,
/// i.e. the hull is locally an eps-parabola. The end nodes are always
/// exposed.
pub fn cluster_decomposition(psi: &GridFunction, eps: f64, tol: f64) -> Result<ClusterDecomposition> {
    check_eps(eps)?;
    if !(tol >= 0.0) {
        return Err(invalid("tol", format!("must be >= 0, got {tol}")));
    }
    let hull = hull_with_shift(psi, eps);
    let hv = hull.values();
    let pv = psi.values();
    let half_curv = 0.5 * eps * psi.h() * psi.h();
    let n = psi.n();

    let mut is_cluster = vec![false; n + 1];
    for i in 1..n {
        let above = pv[i] - hv[i] > tol;
        let local_parabola = 0.5 * (hv[i - 1] + hv[i + 1]) - half_curv;
        let on_parabola = local_parabola - hv[i] <= tol;
        is_cluster[i] = above || on_parabola;
    }

    let mut clusters = Vec::new();
    let mut exposed = Vec::new();
    let mut i = 0;
    while i <= n {
        if is_cluster[i] {
            let start = i;
            while is_cluster[i] {
                i += 1;
            }
            clusters.push((start - 1, i));
        } else {
            exposed.push(i);
            i += 1;
        }
    }
    Ok(ClusterDecomposition {
        clusters,
        exposed,
        tol,
        nodes: n + 1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit(n: usize, f: impl Fn(f64) -> f64) -> GridFunction {
        GridFunction::from_fn(0.0, 1.0, n, f).unwrap()
    }

    /// Brute force: in one dimension the lower envelope at a point is the
    /// smallest value there of any chord whose endpoints straddle it.
    fn hull_oracle(f: &GridFunction) -> Vec<f64> {
        let v = f.values();
        let n = f.n();
        (0..=n)
            .map(|i| {
                let mut best = v[i];
                for j in 0..i {
                    for k in i + 1..=n {
                        let s = (i - j) as f64 / (k - j) as f64;
                        best = best.min(v[j] * (1.0 - s) + v[k] * s);
                    }
                }
                best
            })
            .collect()
    }

    #[test]
    fn convex_input_is_fixed() {
        let f = unit(20, |m| (m - 0.5).abs());
        assert_eq!(convex_hull(&f), f);
    }

    #[test]
    fn concave_bump_hull_is_chord() {
        let f = unit(32, |m| m * (1.0 - m));
        let g = convex_hull(&f);
        assert!(g.values().iter().all(|v| v.abs() < 1e-15));
    }

    #[test]
    fn tent_matches_chord_oracle() {
        let f = unit(10, |m| m.min(0.8 - m));
        let g = convex_hull(&f);
        let oracle = hull_oracle(&f);
        for (a, b) in g.values().iter().zip(&oracle) {
            assert!((a - b).abs() < 1e-14, "{a} vs {b}");
        }
    }

    #[test]
    fn eps_hull_of_parabola_is_itself() {
        let eps = 0.7;
        let f = unit(64, |m| 0.5 * eps * m * m);
        assert_eq!(eps_convex_hull(&f, eps).unwrap(), f);
    }

    #[test]
    fn eps_hull_of_line() {
        let (eps, c) = (0.5, -0.3);
        let f = unit(50, |m| c * m);
        let g = eps_convex_hull(&f, eps).unwrap();
        for (i, m) in g.nodes().enumerate() {
            let expect = 0.5 * eps * m * m + (c - 0.5 * eps) * m;
            assert!((g.get(i) - expect).abs() < 1e-14);
        }
    }

    #[test]
    fn zero_eps_reduces_to_convex_hull() {
        let f = unit(40, |m| (7.0 * m).sin() + 0.3 * (23.0 * m).cos());
        assert_eq!(eps_convex_hull(&f, 0.0).unwrap(), convex_hull(&f));
    }

    #[test]
    fn negative_eps_rejected() {
        let f = unit(4, |m| m);
        assert!(matches!(
            eps_convex_hull(&f, -1.0),
            Err(Error::InvalidArgument { name: "eps", .. })
        ));
    }

    #[test]
    fn eps_convexity_predicate() {
        let eps = 0.4;
        assert!(is_eps_convex(&unit(30, |m| 0.5 * eps * m * m), eps, 1e-14));
        assert!(!is_eps_convex(&unit(30, |m| 2.0 * m), eps, 0.0));
        let g = unit(30, |m| (9.0 * m).sin());
        assert!(is_eps_convex(&eps_convex_hull(&g, eps).unwrap(), eps, 1e-13));
    }

    #[test]
    fn parabola_eval_interpolates() {
        let p = EpsParabola::new(2.0, (0.0, 1.0), (1.0, 3.0)).unwrap();
        assert_eq!(p.eval(0.0), 1.0);
        assert_eq!(p.eval(1.0), 3.0);
        // y = 1 + 2 s - s (1 - s) = 1 + s + s^2
        assert!((p.eval(0.5) - 1.75).abs() < 1e-15);
    }

    #[test]
    fn splice_cases() {
        let eps = 0.3;
        let f = unit(40, |m| 0.5 * eps * m * m + m.powi(4));
        assert_eq!(parabola_splice(&f, 5, 6, eps).unwrap(), f);

        let q = unit(40, |m| 0.5 * eps * m * m);
        let s = parabola_splice(&q, 3, 31, eps).unwrap();
        assert!(s.sup_distance(&q).unwrap() < 1e-15);

        let s = parabola_splice(&f, 10, 30, eps).unwrap();
        assert!(s.values().iter().zip(f.values()).all(|(a, b)| *a >= *b - 1e-15));
        assert!(is_eps_convex(&s, eps, 1e-14));

        let bad = unit(40, |m| -m * m);
        assert!(matches!(
            parabola_splice(&bad, 1, 5, eps),
            Err(Error::NotEpsConvex { .. })
        ));
    }

    #[test]
    fn strictly_convex_potential_has_no_clusters() {
        let eps = 0.5;
        let psi = unit(128, |m| 0.5 * (eps + 1.0) * m * m);
        let d = cluster_decomposition(&psi, eps, default_contact_tol(&psi)).unwrap();
        assert!(d.clusters.is_empty());
        assert_eq!(d.exposed.len(), 129);
    }

    #[test]
    fn exact_parabola_is_one_cluster() {
        let eps = 0.5;
        let psi = unit(128, |m| 0.5 * eps * m * m);
        let d = cluster_decomposition(&psi, eps, default_contact_tol(&psi)).unwrap();
        assert_eq!(d.clusters, vec![(0, 128)]);
        assert_eq!(d.exposed, vec![0, 128]);
    }

    #[test]
    fn spliced_parabola_is_detected() {
        let eps = 0.5;
        let n = 200;
        let base = unit(n, |m| 0.5 * (eps + 2.0) * m * m + 0.1 * m.powi(3));
        let psi = parabola_splice(&base, 60, 140, eps).unwrap();
        let d = cluster_decomposition(&psi, eps, default_contact_tol(&psi)).unwrap();
        assert_eq!(d.clusters.len(), 1);
        let (a, b) = d.clusters[0];
        assert!(a.abs_diff(60) <= 2 && b.abs_diff(140) <= 2, "{a} {b}");
    }

    #[test]
    fn non_convex_input_clusters_where_hull_bridges() {
        let eps = 0.2;
        let psi = unit(100, |m| 0.5 * eps * m * m + (6.0 * m).sin() * 0.05);
        let d = cluster_decomposition(&psi, eps, default_contact_tol(&psi)).unwrap();
        let hull = eps_convex_hull(&psi, eps).unwrap();
        let mask = d.exposed_mask();
        for (i, &exposed) in mask.iter().enumerate() {
            if psi.get(i) - hull.get(i) > d.tol {
                assert!(!exposed);
            }
        }
        for &i in &d.exposed {
            assert!((psi.get(i) - hull.get(i)).abs() <= d.tol);
        }
    }
}
