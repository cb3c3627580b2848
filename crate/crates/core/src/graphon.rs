//! Graphons, their spectra, and W-random graph sampling.
//!
//! Both shipped kernels are translation invariant, `W(x,y) = G(x-y)` with an
//! even 1-periodic `G`, so the integral operator is diagonalized by Fourier
//! modes `e^{2πikx}` with eigenvalues
//!
//! ```text
//! c_k = ∫₀¹ G(u) e^{-2πiku} du
//! ER p:       c_0 = p,  c_k = 0
//! SW (p, r):  c_0 = 2r + p - 4rp,  c_k = (1-2p) sin(2πkr) / (πk)
//! ```

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::io::{self, BufRead, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Graphon {
    /// `W ≡ p`.
    ErdosRenyi { p: f64 },
    /// `W = 1-p` when the circular distance is below `r`, `p` otherwise.
    SmallWorld { p: f64, r: f64 },
    /// All-to-all coupling, `W ≡ 1`.
    Complete,
}

impl Graphon {
    pub fn erdos_renyi(p: f64) -> Result<Self> {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::InvalidParameter(format!("ER p must lie in (0,1), got {p}")));
        }
        Ok(Graphon::ErdosRenyi { p })
    }

    pub fn small_world(p: f64, r: f64) -> Result<Self> {
        if !(p > 0.0 && p < 0.5) {
            return Err(Error::InvalidParameter(format!("SW p must lie in (0,1/2), got {p}")));
        }
        if !(r > 0.0 && r < 0.5) {
            return Err(Error::InvalidParameter(format!("SW r must lie in (0,1/2), got {r}")));
        }
        Ok(Graphon::SmallWorld { p, r })
    }

    pub fn eval(&self, x: f64, y: f64) -> f64 {
        match *self {
            Graphon::ErdosRenyi { p } => p,
            Graphon::SmallWorld { p, r } => {
                if circular_distance(x, y) < r {
                    1.0 - p
                } else {
                    p
                }
            }
            Graphon::Complete => 1.0,
        }
    }

    pub fn fourier_coeff(&self, k: i64) -> f64 {
        match *self {
            Graphon::ErdosRenyi { p } => {
                if k == 0 {
                    p
                } else {
                    0.0
                }
            }
            Graphon::SmallWorld { p, r } => {
                if k == 0 {
                    2.0 * r + p - 4.0 * r * p
                } else {
                    let kf = k as f64;
                    (1.0 - 2.0 * p) * (2.0 * PI * kf * r).sin() / (PI * kf)
                }
            }
            Graphon::Complete => {
                if k == 0 {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }

    /// `∫∫ W`, the expected edge density of a W-random graph.
    pub fn edge_density(&self) -> f64 {
        self.fourier_coeff(0)
    }

    /// Scans `c_k` for `|k| ≤ k_range` and extracts the extreme eigenvalues.
    pub fn spectrum(&self, k_range: usize) -> Result<SpectrumW> {
        if k_range < 64 {
            return Err(Error::InvalidParameter(format!("k_range must be at least 64, got {k_range}")));
        }
        let k_range = k_range as i64;
        let coeffs: BTreeMap<i64, f64> = (-k_range..=k_range).map(|k| (k, self.fourier_coeff(k))).collect();

        // Non-negative k only; c_{-k} = c_k. Strict comparisons keep the smallest |k| on ties.
        let mut max_mode = 0;
        let mut min_mode = 1;
        for k in 0..=k_range {
            if coeffs[&k] > coeffs[&max_mode] {
                max_mode = k;
            }
            if k > 0 && coeffs[&k] < coeffs[&min_mode] {
                min_mode = k;
            }
        }
        if coeffs[&0] < coeffs[&min_mode] {
            min_mode = 0;
        }
        let mu_max = coeffs[&max_mode];
        let mu_min = coeffs[&min_mode];
        if mu_max <= 0.0 {
            return Err(Error::NoPositiveEigenvalue(mu_max));
        }
        let is_simple = |mode: i64, value: f64| {
            coeffs
                .iter()
                .filter(|(k, _)| **k != mode)
                .all(|(_, c)| (c - value).abs() > 1e-12)
        };
        let shape = |mode: i64| {
            if mode == 0 {
                EigenShape::Constant
            } else {
                EigenShape::FourierMode(mode)
            }
        };
        Ok(SpectrumW {
            mu_max,
            max_mode,
            max_shape: shape(max_mode),
            max_simple: is_simple(max_mode, mu_max),
            mu_min,
            min_mode,
            min_shape: shape(min_mode),
            min_simple: is_simple(min_mode, mu_min),
            coeffs,
        })
    }

    /// Samples an `n`-vertex W-random graph on the midpoint grid
    /// `x_i = (2i-1)/(2n)`: each pair `i < j` is joined independently with
    /// probability `W(x_i, x_j)`.
    pub fn sample_graph(&self, n: usize, seed: u64) -> Result<GraphSample> {
        if n < 2 {
            return Err(Error::InvalidParameter(format!("graph needs at least 2 vertices, got {n}")));
        }
        let grid = midpoint_grid(n);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut lists: Vec<Vec<u32>> = vec![Vec::new(); n];
        for i in 0..n {
            for j in (i + 1)..n {
                let w = self.eval(grid[i], grid[j]);
                if rng.random::<f64>() < w {
                    lists[i].push(j as u32);
                    lists[j].push(i as u32);
                }
            }
        }
        Ok(GraphSample::from_lists(grid, lists))
    }
}

/// `min(|x-y|, 1-|x-y|)`.
pub fn circular_distance(x: f64, y: f64) -> f64 {
    let d = (x - y).abs();
    d.min(1.0 - d)
}

pub fn midpoint_grid(n: usize) -> Vec<f64> {
    (0..n).map(|i| (2 * i + 1) as f64 / (2 * n) as f64).collect()
}

/// Shape of an eigenfunction of a translation-invariant kernel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EigenShape {
    Constant,
    FourierMode(i64),
    /// Anything else; the normal-form code refuses these.
    Other,
}

/// Extreme eigenvalues of W read off its Fourier coefficients.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumW {
    pub mu_max: f64,
    pub max_mode: i64,
    pub max_shape: EigenShape,
    pub max_simple: bool,
    pub mu_min: f64,
    /// `k*`, reported as the non-negative member of the `±k*` pair.
    pub min_mode: i64,
    pub min_shape: EigenShape,
    /// Always false for `k* ≠ 0`: the `±k*` modes share the eigenvalue.
    pub min_simple: bool,
    pub coeffs: BTreeMap<i64, f64>,
}

impl SpectrumW {
    /// A spectrum with a single constant mode, e.g. for an all-to-all
    /// network with coupling rescaled by `mu`.
    pub fn constant(mu: f64) -> Result<Self> {
        if mu <= 0.0 {
            return Err(Error::NoPositiveEigenvalue(mu));
        }
        Ok(Self {
            mu_max: mu,
            max_mode: 0,
            max_shape: EigenShape::Constant,
            max_simple: true,
            mu_min: 0.0,
            min_mode: 1,
            min_shape: EigenShape::FourierMode(1),
            min_simple: false,
            coeffs: BTreeMap::from([(0, mu)]),
        })
    }

    pub fn has_negative_branch(&self) -> bool {
        self.mu_min < 0.0
    }
}

/// A sampled graph in compressed sparse row form. Both directions of every
/// edge are stored, neighbor lists sorted ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphSample {
    pub n: usize,
    /// Latent coordinates `x_i`.
    pub grid: Vec<f64>,
    offsets: Vec<usize>,
    neighbors: Vec<u32>,
}

impl GraphSample {
    fn from_lists(grid: Vec<f64>, lists: Vec<Vec<u32>>) -> Self {
        let n = grid.len();
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        let total: usize = lists.iter().map(Vec::len).sum();
        let mut neighbors = Vec::with_capacity(total);
        for list in lists {
            neighbors.extend_from_slice(&list);
            offsets.push(neighbors.len());
        }
        Self {
            n,
            grid,
            offsets,
            neighbors,
        }
    }

    /// Builds a graph on the midpoint grid from undirected edges `(i, j)`.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut lists: Vec<Vec<u32>> = vec![Vec::new(); n];
        for &(i, j) in edges {
            if i >= n || j >= n || i == j {
                return Err(Error::InvalidParameter(format!("bad edge ({i}, {j}) for n = {n}")));
            }
            lists[i].push(j as u32);
            lists[j].push(i as u32);
        }
        for list in &mut lists {
            list.sort_unstable();
            list.dedup();
        }
        Ok(Self::from_lists(midpoint_grid(n), lists))
    }

    #[inline]
    pub fn neighbors(&self, i: usize) -> &[u32] {
        &self.neighbors[self.offsets[i]..self.offsets[i + 1]]
    }

    /// Row offsets and concatenated neighbor lists.
    pub(crate) fn csr(&self) -> (&[usize], &[u32]) {
        (&self.offsets, &self.neighbors)
    }

    pub fn degree(&self, i: usize) -> usize {
        self.offsets[i + 1] - self.offsets[i]
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.neighbors(i).binary_search(&(j as u32)).is_ok()
    }

    pub fn edge_count(&self) -> usize {
        self.neighbors.len() / 2
    }

    /// Undirected edges with `i < j`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n).flat_map(move |i| {
            self.neighbors(i)
                .iter()
                .map(|&j| j as usize)
                .filter(move |&j| j > i)
                .map(move |j| (i, j))
        })
    }

    pub fn edge_density(&self) -> f64 {
        let pairs = self.n * (self.n - 1) / 2;
        self.edge_count() as f64 / pairs as f64
    }

    /// Writes `n <count>` followed by one `i j` line per edge (0-based, `i < j`).
    pub fn write_edge_list<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "n {}", self.n)?;
        for (i, j) in self.edges() {
            writeln!(out, "{i} {j}")?;
        }
        Ok(())
    }

    /// Parses the format written by [`write_edge_list`](Self::write_edge_list).
    /// The latent grid is reconstructed as the midpoint grid.
    pub fn read_edge_list<R: BufRead>(input: R) -> Result<Self> {
        let mut lines = input.lines();
        let bad = |msg: String| Error::InvalidParameter(format!("edge list: {msg}"));
        let header = lines
            .next()
            .ok_or_else(|| bad("missing header".into()))?
            .map_err(|e| bad(e.to_string()))?;
        let n: usize = header
            .strip_prefix("n ")
            .and_then(|s| s.trim().parse().ok())
            .ok_or_else(|| bad(format!("bad header {header:?}")))?;
        let mut edges = Vec::new();
        for line in lines {
            let line = line.map_err(|e| bad(e.to_string()))?;
            if line.trim().is_empty() {
                continue;
            }
            let mut parts = line.split_whitespace().map(str::parse::<usize>);
            match (parts.next(), parts.next(), parts.next()) {
                (Some(Ok(i)), Some(Ok(j)), None) if i < j => edges.push((i, j)),
                _ => return Err(bad(format!("bad edge line {line:?}"))),
            }
        }
        Self::from_edges(n, &edges)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::Quadrature;

    fn sw() -> Graphon {
        Graphon::small_world(0.1, 0.3).unwrap()
    }

    #[test]
    fn kernel_values() {
        let er = Graphon::erdos_renyi(0.5).unwrap();
        assert_eq!(er.eval(0.1, 0.9), 0.5);
        assert_eq!(sw().eval(0.0, 0.1), 0.9);
        assert_eq!(sw().eval(0.0, 0.5), 0.1);
        // Wraps around the circle.
        assert_eq!(sw().eval(0.05, 0.95), 0.9);
    }

    #[test]
    fn kernel_is_symmetric_and_bounded() {
        let g = sw();
        for i in 0..40 {
            for j in 0..40 {
                let (x, y) = (i as f64 / 39.0, j as f64 / 39.0);
                let w = g.eval(x, y);
                assert_eq!(w, g.eval(y, x));
                assert!((0.0..=1.0).contains(&w));
            }
        }
    }

    #[test]
    fn fourier_coefficients() {
        assert!((sw().fourier_coeff(0) - 0.58).abs() < 1e-15);
        assert_eq!(Graphon::erdos_renyi(0.5).unwrap().fourier_coeff(3), 0.0);
        let c1 = 0.8 * (0.6 * PI).sin() / PI;
        assert!((sw().fourier_coeff(1) - c1).abs() < 1e-15);
        for k in 1..20 {
            assert_eq!(sw().fourier_coeff(k), sw().fourier_coeff(-k));
        }
    }

    #[test]
    fn fourier_coefficients_match_quadrature() {
        let g = sw();
        let q = Quadrature::default();
        // G(u) = W(0, u); break at the jumps u = r and u = 1 - r.
        for k in 0..6 {
            let kf = k as f64;
            let v: f64 = q
                .integrate_points(|u| g.eval(0.0, u) * (2.0 * PI * kf * u).cos(), &[0.0, 0.3, 0.7, 1.0])
                .unwrap();
            assert!((v - g.fourier_coeff(k)).abs() < 1e-12, "k={k}: {v}");
        }
    }

    #[test]
    fn er_spectrum() {
        let s = Graphon::erdos_renyi(0.5).unwrap().spectrum(512).unwrap();
        assert_eq!(s.mu_max, 0.5);
        assert_eq!(s.max_shape, EigenShape::Constant);
        assert!(s.max_simple);
        assert_eq!(s.mu_min, 0.0);
        assert!(!s.has_negative_branch());
        assert!(s.coeffs.iter().all(|(k, c)| *k == 0 || *c == 0.0));
    }

    #[test]
    fn sw_spectrum() {
        let s = sw().spectrum(512).unwrap();
        assert!((s.mu_max - 0.58).abs() < 1e-15);
        assert_eq!(s.max_mode, 0);
        assert!(s.max_simple);
        assert_eq!(s.min_mode, 2);
        assert!((s.mu_min - 0.8 * (1.2 * PI).sin() / (2.0 * PI)).abs() < 1e-15);
        assert!((s.mu_min + 0.074_839_142_703_091_11).abs() < 1e-14);
        assert!(!s.min_simple);
        assert_eq!(s.min_shape, EigenShape::FourierMode(2));
    }

    #[test]
    fn spectrum_preconditions() {
        assert!(matches!(sw().spectrum(10), Err(Error::InvalidParameter(_))));
        assert!(matches!(SpectrumW::constant(-1.0), Err(Error::NoPositiveEigenvalue(_))));
    }

    /// Midpoint-rule discretization `W(x_i, x_j)/n`, diagonalized densely.
    fn dense_eigenvalues(g: &Graphon, n: usize) -> Vec<f64> {
        let grid = midpoint_grid(n);
        let m = nalgebra::DMatrix::from_fn(n, n, |i, j| g.eval(grid[i], grid[j]) / n as f64);
        let mut ev: Vec<f64> = m.symmetric_eigen().eigenvalues.iter().copied().collect();
        ev.sort_by(|a, b| b.abs().total_cmp(&a.abs()));
        ev
    }

    #[test]
    fn dense_kernel_eigenvalues_match_fourier_coefficients() {
        let g = sw();
        let dense = dense_eigenvalues(&g, 512);
        let mut closed: Vec<f64> = (-300..=300).map(|k| g.fourier_coeff(k)).collect();
        closed.sort_by(|a, b| b.abs().total_cmp(&a.abs()));
        for (d, c) in dense.iter().zip(&closed).take(10) {
            assert!((d - c).abs() < 1e-2, "{d} vs {c}");
        }
        let dense_min = dense.iter().copied().fold(f64::INFINITY, f64::min);
        let s = g.spectrum(512).unwrap();
        assert!((dense_min - s.mu_min).abs() < 1e-3, "{dense_min} vs {}", s.mu_min);
    }

    #[test]
    fn er_sample_density() {
        let g = Graphon::erdos_renyi(0.5).unwrap().sample_graph(2000, 3).unwrap();
        let pairs = 2000.0 * 1999.0 / 2.0;
        let sd = (0.25f64 / pairs).sqrt();
        assert!((g.edge_density() - 0.5).abs() < 4.0 * sd, "{}", g.edge_density());
    }

    #[test]
    fn sw_sample_density() {
        let w = sw();
        let g = w.sample_graph(1000, 9).unwrap();
        // Per-pair Bernoulli variances are p(1-p) either way: 0.09.
        let pairs = 1000.0 * 999.0 / 2.0;
        let sd = (0.09f64 / pairs).sqrt();
        // The midpoint grid shifts the expected density by O(1/n).
        let expected = {
            let grid = midpoint_grid(1000);
            let mut s = 0.0;
            for i in 0..1000 {
                for j in (i + 1)..1000 {
                    s += w.eval(grid[i], grid[j]);
                }
            }
            s / pairs
        };
        assert!((g.edge_density() - expected).abs() < 4.0 * sd);
        assert!((expected - 0.58).abs() < 2e-3);
    }

    #[test]
    fn smallest_graph_is_one_bernoulli_edge() {
        let er = Graphon::erdos_renyi(0.5).unwrap();
        let mut seen = [false; 2];
        for seed in 0..64 {
            let g = er.sample_graph(2, seed).unwrap();
            assert!(g.edge_count() <= 1);
            assert_eq!(g.has_edge(0, 1), g.has_edge(1, 0));
            seen[g.edge_count()] = true;
        }
        assert!(seen[0] && seen[1]);
        assert!(er.sample_graph(1, 0).is_err());
    }

    #[test]
    fn zero_rewiring_gives_circulant_graph() {
        let w = Graphon::SmallWorld { p: 0.0, r: 0.3 };
        let g = w.sample_graph(50, 1).unwrap();
        for i in 0..50 {
            for j in 0..50 {
                let expect = i != j && circular_distance(g.grid[i], g.grid[j]) < 0.3;
                assert_eq!(g.has_edge(i, j), expect, "({i},{j})");
            }
        }
    }

    #[test]
    fn sample_is_symmetric_loop_free_and_reproducible() {
        let w = sw();
        let a = w.sample_graph(300, 5).unwrap();
        let b = w.sample_graph(300, 5).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, w.sample_graph(300, 6).unwrap());
        for i in 0..300 {
            assert!(!a.has_edge(i, i));
            for &j in a.neighbors(i) {
                assert!(a.has_edge(j as usize, i));
            }
        }
    }

    #[test]
    fn edge_list_round_trip() {
        let g = sw().sample_graph(40, 2).unwrap();
        let mut buf = Vec::new();
        g.write_edge_list(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("n 40\n"));
        let back = GraphSample::read_edge_list(&buf[..]).unwrap();
        assert_eq!(back, g);
        assert!(GraphSample::read_edge_list(&b"n 3\n2 1\n"[..]).is_err());
    }

    #[test]
    fn rejects_out_of_range_parameters() {
        assert!(Graphon::erdos_renyi(1.5).is_err());
        assert!(Graphon::small_world(0.6, 0.3).is_err());
        assert!(Graphon::small_world(0.1, 0.5).is_err());
    }
}
