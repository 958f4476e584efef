//! Cell-centered radial discretization of ℝᴺ for radially symmetric fields.
//!
//! Nodes sit at `r_j = (j + 1/2) Δr`, so the singular point `r = 0` is never
//! sampled and the weights `|x|^{-b}` of the inhomogeneous nonlinearities stay
//! finite. Quadrature weights encode the full volume measure
//! `ω_{N-1} r^{N-1} Δr`, turning sums over nodes into integrals over ℝᴺ.

use std::io::{Read, Write};
use std::path::Path;
use std::sync::Arc;

use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum GridError {
    #[error("bad grid spec: {0}")]
    BadGridSpec(String),
    #[error("sample length {got} does not match grid size {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("non-finite sample at node {index}")]
    NonFiniteSample { index: usize },
    #[error("snapshot i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed snapshot: {0}")]
    MalformedSnapshot(String),
}

/// Surface area of the unit sphere S^{N-1}, i.e. `ω_{N-1} = 2π^{N/2}/Γ(N/2)`.
pub fn unit_sphere_area(dimension: u32) -> f64 {
    use std::f64::consts::PI;
    match dimension {
        3 => 4.0 * PI,
        4 => 2.0 * PI * PI,
        5 => 8.0 * PI * PI / 3.0,
        _ => unreachable!("dimension validated at grid construction"),
    }
}

/// Cell-centered radial mesh on `(0, R)` with volume quadrature weights.
#[derive(Debug, Clone)]
pub struct RadialGrid {
    dimension: u32,
    radius: f64,
    dr: f64,
    nodes: Vec<f64>,
    weights: Vec<f64>,
    /// `r_j^{(N-1)/2}`, the reduction factor turning u into v = r^{(N-1)/2} u.
    reduction: Vec<f64>,
    reduction_inv: Vec<f64>,
}

impl RadialGrid {
    /// Builds the mesh. Requires `N ∈ {3,4,5}`, `R > 0`, and `M ≥ 16` a power
    /// of two (the linear propagator's sine transform runs on radix-2 sizes).
    pub fn new(dimension: u32, radius: f64, points: usize) -> Result<Arc<Self>, GridError> {
        if !(3..=5).contains(&dimension) {
            return Err(GridError::BadGridSpec(format!(
                "dimension N = {dimension} not in {{3, 4, 5}}"
            )));
        }
        if !(radius.is_finite() && radius > 0.0) {
            return Err(GridError::BadGridSpec(format!("radius R = {radius} <= 0")));
        }
        if points < 16 || !points.is_power_of_two() {
            return Err(GridError::BadGridSpec(format!(
                "point count M = {points} must be a power of two >= 16"
            )));
        }
        let dr = radius / points as f64;
        let area = unit_sphere_area(dimension);
        let half_power = (dimension as f64 - 1.0) / 2.0;
        let mut nodes = Vec::with_capacity(points);
        let mut weights = Vec::with_capacity(points);
        let mut reduction = Vec::with_capacity(points);
        let mut reduction_inv = Vec::with_capacity(points);
        for j in 0..points {
            let r = (j as f64 + 0.5) * dr;
            nodes.push(r);
            weights.push(area * r.powi(dimension as i32 - 1) * dr);
            let red = r.powf(half_power);
            reduction.push(red);
            reduction_inv.push(1.0 / red);
        }
        Ok(Arc::new(RadialGrid {
            dimension,
            radius,
            dr,
            nodes,
            weights,
            reduction,
            reduction_inv,
        }))
    }

    pub fn dimension(&self) -> u32 {
        self.dimension
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn dr(&self) -> f64 {
        self.dr
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Centrifugal constant `(N-1)(N-3)/4` of the reduced radial Laplacian
    /// `∂_rr - c_N/r²`. Zero in dimension 3.
    pub fn centrifugal_constant(&self) -> f64 {
        let n = self.dimension as f64;
        (n - 1.0) * (n - 3.0) / 4.0
    }

    /// `∫_{ℝᴺ} f(|x|) dx` by the midpoint rule in r with the volume weights.
    pub fn integrate(&self, samples: &[f64]) -> Result<f64, GridError> {
        if samples.len() != self.len() {
            return Err(GridError::LengthMismatch {
                expected: self.len(),
                got: samples.len(),
            });
        }
        for (index, s) in samples.iter().enumerate() {
            if !s.is_finite() {
                return Err(GridError::NonFiniteSample { index });
            }
        }
        Ok(self.dot_weights(samples))
    }

    pub(crate) fn dot_weights(&self, samples: &[f64]) -> f64 {
        samples
            .iter()
            .zip(&self.weights)
            .map(|(s, w)| s * w)
            .sum()
    }
}

/// Complex radial profile `u(r_j)` at a fixed time.
#[derive(Debug, Clone)]
pub struct Field {
    grid: Arc<RadialGrid>,
    values: Vec<Complex64>,
    pub time: f64,
}

impl Field {
    pub fn new(
        grid: Arc<RadialGrid>,
        values: Vec<Complex64>,
        time: f64,
    ) -> Result<Self, GridError> {
        if values.len() != grid.len() {
            return Err(GridError::LengthMismatch {
                expected: grid.len(),
                got: values.len(),
            });
        }
        if let Some(index) = values.iter().position(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(GridError::NonFiniteSample { index });
        }
        Ok(Field { grid, values, time })
    }

    pub fn from_profile(grid: Arc<RadialGrid>, f: impl Fn(f64) -> Complex64) -> Self {
        let values = grid.nodes().iter().map(|&r| f(r)).collect();
        Field {
            grid,
            values,
            time: 0.0,
        }
    }

    /// The chirped Gaussian `A exp(-(r/w)²) exp(-i c r²)` used as the standard
    /// initial-data family; `c > 0` makes the virial quantity `y(0) = 2c V(0)`
    /// positive.
    pub fn chirped_gaussian(grid: Arc<RadialGrid>, amplitude: f64, width: f64, chirp: f64) -> Self {
        Field::from_profile(grid, |r| {
            Complex64::from_polar((-(r / width).powi(2)).exp() * amplitude, -chirp * r * r)
        })
    }

    pub fn grid(&self) -> &Arc<RadialGrid> {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn max_amplitude(&self) -> f64 {
        self.values
            .iter()
            .map(|v| v.norm_sqr())
            .fold(0.0f64, f64::max)
            .sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.values
            .iter()
            .all(|v| v.re.is_finite() && v.im.is_finite())
    }

    /// Grid L² norm `(∫ |u|² dx)^{1/2}`.
    pub fn l2_norm(&self) -> f64 {
        self.values
            .iter()
            .zip(self.grid.weights())
            .map(|(v, w)| v.norm_sqr() * w)
            .sum::<f64>()
            .sqrt()
    }

    pub fn l2_distance(&self, other: &Field) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .zip(self.grid.weights())
            .map(|((a, b), w)| (a - b).norm_sqr() * w)
            .sum::<f64>()
            .sqrt()
    }

    /// Mass fraction in the outermost cell; a proxy for how much of the field
    /// has reached the Dirichlet truncation radius.
    pub fn tail_fraction(&self) -> f64 {
        let last = self.values.len() - 1;
        let tail = self.values[last].norm_sqr() * self.grid.weights()[last];
        let total: f64 = self
            .values
            .iter()
            .zip(self.grid.weights())
            .map(|(v, w)| v.norm_sqr() * w)
            .sum();
        if total > 0.0 {
            tail / total
        } else {
            0.0
        }
    }
}

/// `∂u/∂r` at the nodes: fourth-order central stencils in the interior, even
/// extension across r = 0 (radial regularity forces u'(0) = 0), one-sided
/// stencils at the two outermost cells.
pub fn radial_derivative(field: &Field) -> Vec<Complex64> {
    let u = field.values();
    let m = u.len();
    let h = field.grid().dr();
    let inv12h = 1.0 / (12.0 * h);
    let mut out = Vec::with_capacity(m);
    // Mirror index for the even extension about r = 0: node -1-j reflects to j.
    let at = |j: isize| -> Complex64 {
        if j < 0 {
            u[(-1 - j) as usize]
        } else {
            u[j as usize]
        }
    };
    for j in 0..m {
        let d = if j + 2 < m {
            let j = j as isize;
            (at(j - 2) - 8.0 * at(j - 1) + 8.0 * at(j + 1) - at(j + 2)) * inv12h
        } else if j + 2 == m {
            (3.0 * u[j + 1] + 10.0 * u[j] - 18.0 * u[j - 1] + 6.0 * u[j - 2] - u[j - 3]) * inv12h
        } else {
            (25.0 * u[j] - 48.0 * u[j - 1] + 36.0 * u[j - 2] - 16.0 * u[j - 3] + 3.0 * u[j - 4])
                * inv12h
        };
        out.push(d);
    }
    out
}

/// Reduced variable `v_j = r_j^{(N-1)/2} u_j`, under which the radial
/// Laplacian becomes `∂_rr - c_N/r²`.
pub fn to_reduced(field: &Field) -> Vec<Complex64> {
    field
        .values()
        .iter()
        .zip(&field.grid().reduction)
        .map(|(u, f)| u * f)
        .collect()
}

/// Inverse of [`to_reduced`]: `u_j = r_j^{-(N-1)/2} v_j`.
pub fn from_reduced(
    grid: &Arc<RadialGrid>,
    reduced: &[Complex64],
    time: f64,
) -> Result<Field, GridError> {
    if reduced.len() != grid.len() {
        return Err(GridError::LengthMismatch {
            expected: grid.len(),
            got: reduced.len(),
        });
    }
    let values = reduced
        .iter()
        .zip(&grid.reduction_inv)
        .map(|(v, f)| v * f)
        .collect();
    Field::new(grid.clone(), values, time)
}

pub(crate) fn apply_reduction(grid: &RadialGrid, values: &mut [Complex64]) {
    for (v, f) in values.iter_mut().zip(&grid.reduction) {
        *v *= *f;
    }
}

pub(crate) fn apply_reduction_inv(grid: &RadialGrid, values: &mut [Complex64]) {
    for (v, f) in values.iter_mut().zip(&grid.reduction_inv) {
        *v *= *f;
    }
}

/// Writes a snapshot as CSV with columns `r, re_u, im_u`.
pub fn write_csv_snapshot(field: &Field, mut out: impl Write) -> Result<(), GridError> {
    writeln!(out, "r,re_u,im_u")?;
    for (r, v) in field.grid().nodes().iter().zip(field.values()) {
        writeln!(out, "{r},{},{}", v.re, v.im)?;
    }
    Ok(())
}

/// Writes the compact binary snapshot: header `N: u32, R: f64, M: u32, t: f64`
/// then `M` interleaved `(re, im)` doubles, all little-endian.
pub fn write_binary_snapshot(field: &Field, mut out: impl Write) -> Result<(), GridError> {
    let grid = field.grid();
    out.write_all(&grid.dimension().to_le_bytes())?;
    out.write_all(&grid.radius().to_le_bytes())?;
    out.write_all(&(grid.len() as u32).to_le_bytes())?;
    out.write_all(&field.time.to_le_bytes())?;
    for v in field.values() {
        out.write_all(&v.re.to_le_bytes())?;
        out.write_all(&v.im.to_le_bytes())?;
    }
    Ok(())
}

/// Reads a binary snapshot written by [`write_binary_snapshot`].
pub fn read_binary_snapshot(mut input: impl Read) -> Result<Field, GridError> {
    let mut u32buf = [0u8; 4];
    let mut f64buf = [0u8; 8];
    input.read_exact(&mut u32buf)?;
    let dimension = u32::from_le_bytes(u32buf);
    input.read_exact(&mut f64buf)?;
    let radius = f64::from_le_bytes(f64buf);
    input.read_exact(&mut u32buf)?;
    let points = u32::from_le_bytes(u32buf) as usize;
    input.read_exact(&mut f64buf)?;
    let time = f64::from_le_bytes(f64buf);
    let grid = RadialGrid::new(dimension, radius, points)
        .map_err(|e| GridError::MalformedSnapshot(e.to_string()))?;
    let mut values = Vec::with_capacity(points);
    for _ in 0..points {
        input.read_exact(&mut f64buf)?;
        let re = f64::from_le_bytes(f64buf);
        input.read_exact(&mut f64buf)?;
        let im = f64::from_le_bytes(f64buf);
        values.push(Complex64::new(re, im));
    }
    Field::new(grid, values, time)
}

pub fn write_binary_snapshot_to(field: &Field, path: &Path) -> Result<(), GridError> {
    let file = std::fs::File::create(path)?;
    write_binary_snapshot(field, std::io::BufWriter::new(file))
}

pub fn read_binary_snapshot_from(path: &Path) -> Result<Field, GridError> {
    let file = std::fs::File::open(path)?;
    read_binary_snapshot(std::io::BufReader::new(file))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn rel_err(got: f64, want: f64) -> f64 {
        (got - want).abs() / want.abs()
    }

    #[test]
    fn grid_spec_validation() {
        assert!(RadialGrid::new(3, 20.0, 4096).is_ok());
        assert!(RadialGrid::new(2, 20.0, 4096).is_err());
        assert!(RadialGrid::new(3, -1.0, 4096).is_err());
        assert!(RadialGrid::new(3, 20.0, 1000).is_err()); // not a power of two
        assert!(RadialGrid::new(3, 20.0, 8).is_err());
    }

    #[test]
    fn nodes_are_cell_centered() {
        let g = RadialGrid::new(3, 20.0, 4096).unwrap();
        let dr = 20.0 / 4096.0;
        assert_eq!(g.dr(), dr);
        assert_eq!(g.nodes()[0], dr / 2.0);
        assert!(g.nodes().iter().all(|&r| r > 0.0));
    }

    #[test]
    fn ball_volumes() {
        // |B_1| in R^3 = 4π/3, in R^4 = π²/2.
        let g3 = RadialGrid::new(3, 1.0, 1024).unwrap();
        let v3: f64 = g3.weights().iter().sum();
        assert!(rel_err(v3, 4.0 * PI / 3.0) < 1e-4);

        let g4 = RadialGrid::new(4, 1.0, 1024).unwrap();
        let v4: f64 = g4.weights().iter().sum();
        assert!(rel_err(v4, PI * PI / 2.0) < 1e-4);

        let g = RadialGrid::new(3, 20.0, 4096).unwrap();
        let v: f64 = g.weights().iter().sum();
        assert!(rel_err(v, 4.0 * PI / 3.0 * 8000.0) < 1e-3);
    }

    #[test]
    fn quadrature_second_order_on_ball_volume() {
        // The ball-volume integrand has a nonzero derivative at r = R, so the
        // midpoint error there scales as Δr². (Decaying integrands like the
        // Gaussian are integrated to near machine precision instead.)
        let err = |m: usize| {
            let g = RadialGrid::new(3, 1.0, m).unwrap();
            (g.weights().iter().sum::<f64>() - 4.0 * PI / 3.0).abs()
        };
        let ratio = err(256) / err(512);
        assert!((3.5..=4.5).contains(&ratio), "ratio = {ratio}");
    }

    #[test]
    fn integrate_gaussian_closed_form() {
        let g = RadialGrid::new(3, 20.0, 4096).unwrap();
        let samples: Vec<f64> = g.nodes().iter().map(|&r| (-2.0 * r * r).exp()).collect();
        // ∫ exp(-2|x|²) dx over R³ = (π/2)^{3/2}.
        let exact = (PI / 2.0).powf(1.5);
        assert!(rel_err(g.integrate(&samples).unwrap(), exact) < 1e-6);

        let zeros = vec![0.0; g.len()];
        assert_eq!(g.integrate(&zeros).unwrap(), 0.0);
    }

    #[test]
    fn integrate_singular_weight_closed_form() {
        // ∫ |x|^{-1/2} exp(-2|x|²) dx over R³ = 4π ∫ r^{3/2} e^{-2r²} dr
        //                                     = 4π Γ(5/4)/(2 · 2^{5/4}),
        // Γ(5/4) = 0.90640247705547707798.
        let g = RadialGrid::new(3, 20.0, 4096).unwrap();
        let samples: Vec<f64> = g
            .nodes()
            .iter()
            .map(|&r| r.powf(-0.5) * (-2.0 * r * r).exp())
            .collect();
        let gamma_5_4 = 0.906_402_477_055_477;
        let exact = 4.0 * PI * gamma_5_4 / (2.0 * 2.0f64.powf(1.25));
        assert!(rel_err(g.integrate(&samples).unwrap(), exact) < 1e-5);
    }

    #[test]
    fn integrate_rejects_bad_input() {
        let g = RadialGrid::new(3, 1.0, 16).unwrap();
        assert!(matches!(
            g.integrate(&[0.0; 8]),
            Err(GridError::LengthMismatch { .. })
        ));
        let mut s = vec![0.0; 16];
        s[3] = f64::NAN;
        assert!(matches!(
            g.integrate(&s),
            Err(GridError::NonFiniteSample { index: 3 })
        ));
    }

    #[test]
    fn derivative_of_constant_is_zero() {
        let g = RadialGrid::new(3, 10.0, 256).unwrap();
        let f = Field::from_profile(g, |_| Complex64::new(2.5, -1.0));
        let d = radial_derivative(&f);
        assert!(d.iter().all(|v| v.norm() < 1e-12));
    }

    #[test]
    fn derivative_reproduces_quadratic_exactly() {
        let g = RadialGrid::new(3, 10.0, 256).unwrap();
        let f = Field::from_profile(g.clone(), |r| Complex64::new(r * r, 0.0));
        let d = radial_derivative(&f);
        for (r, v) in g.nodes().iter().zip(&d) {
            assert!((v.re - 2.0 * r).abs() < 1e-9, "at r = {r}");
        }
    }

    #[test]
    fn derivative_fourth_order_on_gaussian() {
        let max_err = |m: usize| {
            let g = RadialGrid::new(3, 10.0, m).unwrap();
            let f = Field::from_profile(g.clone(), |r| Complex64::new((-r * r).exp(), 0.0));
            radial_derivative(&f)
                .iter()
                .zip(g.nodes())
                .map(|(v, &r)| (v.re + 2.0 * r * (-r * r).exp()).abs())
                .fold(0.0f64, f64::max)
        };
        let coarse = max_err(256);
        let fine = max_err(512);
        assert!(coarse < 1e-5);
        let ratio = coarse / fine;
        assert!((10.0..=24.0).contains(&ratio), "ratio = {ratio}");
    }

    #[test]
    fn reduction_constants() {
        assert_eq!(RadialGrid::new(3, 1.0, 16).unwrap().centrifugal_constant(), 0.0);
        assert_eq!(RadialGrid::new(5, 1.0, 16).unwrap().centrifugal_constant(), 2.0);
        let g = RadialGrid::new(3, 1.0, 16).unwrap();
        let f = Field::from_profile(g.clone(), |r| Complex64::new(1.0 + r, 0.0));
        let v = to_reduced(&f);
        for ((r, u), v) in g.nodes().iter().zip(f.values()).zip(&v) {
            assert!((v.re - r * u.re).abs() < 1e-15);
        }
    }

    #[test]
    fn binary_snapshot_roundtrip() {
        let g = RadialGrid::new(4, 5.0, 64).unwrap();
        let mut f = Field::from_profile(g, |r| Complex64::new((-r).exp(), r.sin()));
        f.time = 1.25;
        let mut buf = Vec::new();
        write_binary_snapshot(&f, &mut buf).unwrap();
        let back = read_binary_snapshot(buf.as_slice()).unwrap();
        assert_eq!(back.time, 1.25);
        assert_eq!(back.grid().dimension(), 4);
        assert_eq!(back.values(), f.values());
    }

    proptest! {
        #[test]
        fn reduced_roundtrip_is_exact(seed in 0u64..1000, dim in 3u32..=5) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let g = RadialGrid::new(dim, 8.0, 64).unwrap();
            let values: Vec<Complex64> = (0..64)
                .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect();
            let f = Field::new(g.clone(), values, 0.0).unwrap();
            let back = from_reduced(&g, &to_reduced(&f), 0.0).unwrap();
            for (a, b) in f.values().iter().zip(back.values()) {
                prop_assert!((a - b).norm() <= 1e-13 * (1.0 + a.norm()));
            }
        }
    }
}
