//! Seeded random instances: coupled QPs, mass-spring chains and random LTI specs.

use auglag_core::{BoxSet, LtiModel, Matrix, MpcSpec, ProblemInstance};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// Random QP together with its interior feasibility witness.
#[derive(Debug, Clone)]
pub struct GeneratedQp {
    pub problem: ProblemInstance,
    /// `z0 ∈ int Z` with `Az0 = b`
    pub z0: Vec<f64>,
    /// Rows of the Hessian factor.
    pub rank: usize,
}

fn normal_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Matrix {
    let data = (0..rows * cols).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
    Matrix::from_row_major(rows, cols, data).expect("sized")
}

/// `H = GᵀG` with `G ∈ ℝ^{r×n}` standard normal, `r` uniform in `[⌈n/2⌉, ⌊0.9n⌋]`;
/// `A ∈ ℝ^{⌈n/2⌉×n}` and `q` standard normal; `Z = [−1,1]ⁿ`; `b = Az0` with `z0`
/// uniform in `(−1,1)ⁿ`.
pub fn generate_random_qp(n: usize, seed: u64) -> GeneratedQp {
    assert!(n >= 2, "random QPs need n >= 2");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let lo = n.div_ceil(2);
    let hi = ((9 * n) / 10).max(lo);
    let rank = rng.random_range(lo..=hi);
    let g = normal_matrix(&mut rng, rank, n);
    let h = g.gram();
    let m = n.div_ceil(2);
    loop {
        let a = normal_matrix(&mut rng, m, n);
        let q: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
        let z0: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let b = a.mul_vec(&z0);
        let bounds = BoxSet::uniform(n, -1.0, 1.0).expect("valid box");
        // rank-deficient draws have probability zero; redraw if one occurs
        if let Ok(problem) = ProblemInstance::new(h.clone(), q, a, b, bounds) {
            return GeneratedQp { problem, z0, rank };
        }
    }
}

/// Chain of `masses` masses between two walls, `2·masses` states (positions then
/// velocities), `masses − 1` inputs acting as opposing force pairs on neighbours.
/// Masses and spring constants are uniform in `[0.5, 2]`; symplectic Euler with
/// step 0.1. Costs `Q = P = I`, `R = 0.1·I`; `X = [−4,4]`, `U = [−0.5,0.5]`.
pub fn mass_spring_spec(masses: usize, horizon: usize, seed: u64) -> MpcSpec {
    assert!(masses >= 2, "need at least two masses");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dt = 0.1;
    let mass: Vec<f64> = (0..masses).map(|_| rng.random_range(0.5..2.0)).collect();
    let k: Vec<f64> = (0..=masses).map(|_| rng.random_range(0.5..2.0)).collect();
    let (nx, nu) = (2 * masses, masses - 1);

    // continuous accelerations: a = −(K/m) p + (F/m) u
    let mut kp = Matrix::zeros(masses, masses);
    for i in 0..masses {
        kp[(i, i)] = -(k[i] + k[i + 1]) / mass[i];
        if i > 0 {
            kp[(i, i - 1)] = k[i] / mass[i];
        }
        if i + 1 < masses {
            kp[(i, i + 1)] = k[i + 1] / mass[i];
        }
    }
    let mut fu = Matrix::zeros(masses, nu);
    for j in 0..nu {
        fu[(j, j)] = 1.0 / mass[j];
        fu[(j + 1, j)] = -1.0 / mass[j + 1];
    }

    // v⁺ = v + dt(Kp p + Fu u), p⁺ = p + dt v⁺
    let mut a_x = Matrix::zeros(nx, nx);
    let mut b_u = Matrix::zeros(nx, nu);
    for i in 0..masses {
        let (p, v) = (i, masses + i);
        a_x[(v, v)] = 1.0;
        a_x[(p, p)] = 1.0;
        a_x[(p, v)] = dt;
        for j in 0..masses {
            a_x[(v, j)] += dt * kp[(i, j)];
            a_x[(p, j)] += dt * dt * kp[(i, j)];
        }
        for j in 0..nu {
            b_u[(v, j)] = dt * fu[(i, j)];
            b_u[(p, j)] = dt * dt * fu[(i, j)];
        }
    }
    MpcSpec::new(
        LtiModel::new(a_x, b_u).expect("consistent model"),
        horizon,
        Matrix::identity(nx),
        Matrix::from_diagonal(&vec![0.1; nu]),
        Matrix::identity(nx),
        BoxSet::uniform(nx, -4.0, 4.0).expect("valid box"),
        None,
        BoxSet::uniform(nu, -0.5, 0.5).expect("valid box"),
    )
    .expect("valid spec")
}

/// Random model with `Q = P = GᵀG`, `G ∈ ℝ^{⌈n_x/2⌉×n_x}`, `R = 0.1·I` and unit boxes.
pub fn random_mpc_spec(n_x: usize, n_u: usize, horizon: usize, seed: u64) -> MpcSpec {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a_x = normal_matrix(&mut rng, n_x, n_x).scaled(1.0 / (n_x as f64).sqrt());
    let b_u = normal_matrix(&mut rng, n_x, n_u);
    let g = normal_matrix(&mut rng, n_x.div_ceil(2), n_x);
    let q = g.gram();
    MpcSpec::new(
        LtiModel::new(a_x, b_u).expect("consistent model"),
        horizon,
        q.clone(),
        Matrix::from_diagonal(&vec![0.1; n_u]),
        q,
        BoxSet::uniform(n_x, -1.0, 1.0).expect("valid box"),
        None,
        BoxSet::uniform(n_u, -1.0, 1.0).expect("valid box"),
    )
    .expect("valid spec")
}

/// Initial state uniform in `scale·X`.
pub fn sample_initial_state(spec: &MpcSpec, scale: f64, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let x = spec.state_set();
    x.lower()
        .iter()
        .zip(x.upper())
        .map(|(l, u)| {
            let mid = 0.5 * (l + u);
            let half = 0.5 * (u - l) * scale;
            if half > 0.0 {
                rng.random_range(mid - half..mid + half)
            } else {
                mid
            }
        })
        .collect()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_per_seed() {
        let a = generate_random_qp(10, 7);
        let b = generate_random_qp(10, 7);
        assert_eq!(a.problem, b.problem);
        assert_ne!(a.problem, generate_random_qp(10, 8).problem);
    }

    #[test]
    fn recipe_shape() {
        for n in [6, 10, 20] {
            let g = generate_random_qp(n, 1);
            assert_eq!(g.problem.m(), n.div_ceil(2));
            assert!(g.rank >= n.div_ceil(2) && g.rank <= (9 * n) / 10);
            let ev = g.problem.hessian().symmetric_eigenvalues().unwrap();
            let top = ev[n - 1];
            let numerical_rank = ev.iter().filter(|v| **v > 1e-9 * top).count();
            assert_eq!(numerical_rank, g.rank);
            assert!(g.problem.infeasibility(&g.z0).unwrap() < 1e-12);
            assert!(g.problem.bounds().contains(&g.z0, 0.0));
        }
    }

    #[test]
    fn mass_spring_dimensions() {
        let s = mass_spring_spec(4, 5, 0);
        assert_eq!((s.n_x(), s.n_u()), (8, 3));
    }
}
