//! Box-set primitives: projection, diameter, support function and the
//! normal-cone distance that certifies approximate stationarity.

use alloc::vec::Vec;

use crate::error::{check_dim, Error, Result};
use crate::linalg::sqrt;

/// Default tolerance for deciding that a coordinate sits on a bound.
pub const DEFAULT_ACTIVE_TOL: f64 = 1e-9;

/// Compact box `{z : lb <= z <= ub}` with finite bounds.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BoxSet {
    lb: Vec<f64>,
    ub: Vec<f64>,
}

/// Which bound of a coordinate is active.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ActiveBound {
    Lower,
    Upper,
}

/// Result of the normal-cone distance computation.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalConeDistanceResult {
    pub distance: f64,
    /// Number of active bound constraints (rows of the active constraint matrix).
    pub active_count: usize,
    /// Optimal multiplier per active row, in the order of `active`.
    pub multiplier: Vec<f64>,
    pub active: Vec<(usize, ActiveBound)>,
    /// Scalar comparisons spent solving for the multiplier.
    pub comparisons: usize,
}

impl BoxSet {
    pub fn new(lb: Vec<f64>, ub: Vec<f64>) -> Result<Self> {
        check_dim("box upper bounds", lb.len(), ub.len())?;
        for (i, (l, u)) in lb.iter().zip(&ub).enumerate() {
            if !l.is_finite() || !u.is_finite() || l > u {
                return Err(Error::InvalidBox { index: i });
            }
        }
        Ok(Self { lb, ub })
    }

    /// `[lo, hi]^n`
    pub fn uniform(n: usize, lo: f64, hi: f64) -> Result<Self> {
        Self::new(alloc::vec![lo; n], alloc::vec![hi; n])
    }

    /// Cartesian product of boxes, in order.
    pub fn product<'a>(parts: impl IntoIterator<Item = &'a BoxSet>) -> BoxSet {
        let mut lb = Vec::new();
        let mut ub = Vec::new();
        for p in parts {
            lb.extend_from_slice(&p.lb);
            ub.extend_from_slice(&p.ub);
        }
        BoxSet { lb, ub }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.lb.len()
    }

    #[inline]
    pub fn lower(&self) -> &[f64] {
        &self.lb
    }

    #[inline]
    pub fn upper(&self) -> &[f64] {
        &self.ub
    }

    pub fn contains(&self, z: &[f64], tol: f64) -> bool {
        z.len() == self.dim()
            && z
                .iter()
                .zip(self.lb.iter().zip(&self.ub))
                .all(|(x, (l, u))| *x >= l - tol && *x <= u + tol)
    }

    pub fn project_in_place(&self, z: &mut [f64]) {
        debug_assert_eq!(z.len(), self.dim());
        for (x, (l, u)) in z.iter_mut().zip(self.lb.iter().zip(&self.ub)) {
            *x = x.clamp(*l, *u);
        }
    }

    pub fn project(&self, z: &[f64]) -> Result<Vec<f64>> {
        check_dim("projection point", self.dim(), z.len())?;
        let mut out = z.to_vec();
        self.project_in_place(&mut out);
        Ok(out)
    }

    /// Euclidean diameter `max ‖z − y‖` over the box, i.e. `‖ub − lb‖`.
    pub fn diameter(&self) -> f64 {
        sqrt(
            self.lb
                .iter()
                .zip(&self.ub)
                .map(|(l, u)| (u - l) * (u - l))
                .sum(),
        )
    }

    /// Support function `sup_{z∈Z} ⟨y, z⟩`.
    pub fn support_function(&self, y: &[f64]) -> Result<f64> {
        check_dim("support direction", self.dim(), y.len())?;
        Ok(self.support_unchecked(y))
    }

    pub(crate) fn support_unchecked(&self, y: &[f64]) -> f64 {
        y.iter()
            .zip(self.lb.iter().zip(&self.ub))
            .map(|(yi, (l, u))| if *yi > 0.0 { yi * u } else { yi * l })
            .sum()
    }

    /// `max_{z∈Z} ⟨g, z̄ − z⟩ = h_Z(−g) + ⟨g, z̄⟩`, the variational-inequality gap.
    pub fn variational_gap(&self, z_bar: &[f64], g: &[f64]) -> f64 {
        z_bar
            .iter()
            .zip(g)
            .zip(self.lb.iter().zip(&self.ub))
            .map(|((z, gi), (l, u))| if *gi > 0.0 { gi * (z - l) } else { gi * (z - u) })
            .sum()
    }

    /// `−min_{z∈Z} [⟨g, z − x⟩ + σ/2 ‖z − x‖²]`.
    ///
    /// For a σ-strongly convex function with gradient `g` at `x ∈ Z` this upper-bounds
    /// the optimality gap over `Z`. With σ = 0 it equals [`Self::variational_gap`].
    pub fn strong_convexity_gap_bound(&self, x: &[f64], g: &[f64], sigma: f64) -> f64 {
        let mut total = 0.0;
        for (i, (xi, gi)) in x.iter().zip(g).enumerate() {
            let (l, u) = (self.lb[i], self.ub[i]);
            let d = if sigma > 0.0 {
                (-gi / sigma).clamp(l - xi, u - xi)
            } else if *gi > 0.0 {
                l - xi
            } else {
                u - xi
            };
            total -= gi * d + 0.5 * sigma * d * d;
        }
        total.max(0.0)
    }

    /// Distance from the origin to `g + N_Z(z̄)`.
    ///
    /// Active rows are `+e_i` for bounds `z_i = ub_i` and `−e_i` for `z_i = lb_i`;
    /// because those rows are orthonormal the multiplier problem
    /// `min_{μ≥0} ‖g + C̃ᵀμ‖²` separates into one clamp per active row.
    pub fn normal_cone_distance(
        &self,
        z_bar: &[f64],
        g: &[f64],
        active_tol: f64,
    ) -> Result<NormalConeDistanceResult> {
        check_dim("normal cone point", self.dim(), z_bar.len())?;
        check_dim("normal cone gradient", self.dim(), g.len())?;
        if !self.contains(z_bar, active_tol) {
            return Err(Error::InvalidParameter("point outside the box"));
        }
        let mut residual = g.to_vec();
        let mut active = Vec::new();
        for (i, z) in z_bar.iter().enumerate() {
            if (z - self.lb[i]).abs() <= active_tol {
                active.push((i, ActiveBound::Lower));
            }
            if (self.ub[i] - z).abs() <= active_tol {
                active.push((i, ActiveBound::Upper));
            }
        }
        let mut multiplier = Vec::with_capacity(active.len());
        let mut comparisons = 0;
        for &(i, side) in &active {
            // Row sign s: the residual component is r_i + s·μ, μ ≥ 0.
            let s = match side {
                ActiveBound::Upper => 1.0,
                ActiveBound::Lower => -1.0,
            };
            comparisons += 1;
            let mu = if -s * residual[i] > 0.0 { -s * residual[i] } else { 0.0 };
            residual[i] += s * mu;
            multiplier.push(mu);
        }
        let distance = sqrt(residual.iter().map(|r| r * r).sum());
        Ok(NormalConeDistanceResult {
            distance,
            active_count: active.len(),
            multiplier,
            active,
            comparisons,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn unit(n: usize) -> BoxSet {
        BoxSet::uniform(n, -1.0, 1.0).unwrap()
    }

    #[test]
    fn projection_examples() {
        let b = unit(2);
        assert_eq!(b.project(&[0.3, -0.2]).unwrap(), vec![0.3, -0.2]);
        assert_eq!(b.project(&[2.0, -3.0]).unwrap(), vec![1.0, -1.0]);
        assert!(b.project(&[1.0]).is_err());
    }

    #[test]
    fn diameter_examples() {
        assert_eq!(BoxSet::new(vec![1.0, 2.0], vec![1.0, 2.0]).unwrap().diameter(), 0.0);
        assert_eq!(BoxSet::uniform(4, 0.0, 1.0).unwrap().diameter(), 2.0);
        let b = BoxSet::new(vec![-1.0, -2.0], vec![1.0, 2.0]).unwrap();
        // corner-pair brute force
        let corners = [[-1.0, -2.0], [-1.0, 2.0], [1.0, -2.0], [1.0, 2.0]];
        let mut best: f64 = 0.0;
        for a in &corners {
            for c in &corners {
                best = best.max(crate::linalg::dist(a, c));
            }
        }
        assert!((b.diameter() - best).abs() < 1e-15);
        assert!((best - 20f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn support_function_examples() {
        let b = unit(3);
        assert_eq!(b.support_function(&[0.0; 3]).unwrap(), 0.0);
        assert_eq!(b.support_function(&[0.5, -2.0, 1.0]).unwrap(), 3.5);
        let b = BoxSet::new(vec![0.0, -1.0], vec![2.0, 1.0]).unwrap();
        assert_eq!(b.support_function(&[-1.0, 3.0]).unwrap(), 3.0);
    }

    #[test]
    fn invalid_boxes_rejected() {
        assert_eq!(
            BoxSet::new(vec![0.0, 2.0], vec![1.0, 1.0]),
            Err(Error::InvalidBox { index: 1 })
        );
        assert!(BoxSet::new(vec![f64::NEG_INFINITY], vec![0.0]).is_err());
    }

    #[test]
    fn normal_cone_interior_is_gradient_norm() {
        let b = unit(2);
        let r = b.normal_cone_distance(&[0.2, -0.3], &[3.0, 4.0], DEFAULT_ACTIVE_TOL).unwrap();
        assert_eq!(r.distance, 5.0);
        assert_eq!(r.active_count, 0);
    }

    #[test]
    fn normal_cone_active_upper() {
        let b = unit(2);
        let r = b.normal_cone_distance(&[1.0, 0.0], &[-2.0, 1.0], DEFAULT_ACTIVE_TOL).unwrap();
        assert_eq!(r.multiplier, vec![2.0]);
        assert_eq!(r.distance, 1.0);
        // membership: g = −C̃ᵀμ with μ = 3
        let r = b.normal_cone_distance(&[1.0, 0.0], &[-3.0, 0.0], DEFAULT_ACTIVE_TOL).unwrap();
        assert_eq!(r.distance, 0.0);
        // wrong sign at an upper bound cannot be absorbed
        let r = b.normal_cone_distance(&[1.0, 0.0], &[3.0, 0.0], DEFAULT_ACTIVE_TOL).unwrap();
        assert_eq!(r.distance, 3.0);
        assert_eq!(r.multiplier, vec![0.0]);
    }

    #[test]
    fn normal_cone_rejects_outside_point() {
        let b = unit(1);
        assert!(b.normal_cone_distance(&[1.5], &[0.0], DEFAULT_ACTIVE_TOL).is_err());
    }

    #[test]
    fn gap_bound_reduces_to_variational_gap() {
        let b = BoxSet::new(vec![-1.0, 0.0], vec![2.0, 1.0]).unwrap();
        let x = [0.5, 0.25];
        let g = [1.5, -0.5];
        let vi = b.variational_gap(&x, &g);
        assert!((b.strong_convexity_gap_bound(&x, &g, 0.0) - vi).abs() < 1e-15);
        assert!((vi - (b.support_function(&[-1.5, 0.5]).unwrap() + 0.75 - 0.125)).abs() < 1e-15);
        assert!(b.strong_convexity_gap_bound(&x, &g, 2.0) <= vi);
    }
}
