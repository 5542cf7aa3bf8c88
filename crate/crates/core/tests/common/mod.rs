//! Seeded instance generators and fixture helpers shared by the integration
//! suites.
#![allow(dead_code)]

use std::path::PathBuf;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use yuancert::nlp::{KktData, KktSpec};
use yuancert::{FirstOrderCone, MatrixFamily, SymMatrix};

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn sym(rows: &[&[f64]]) -> SymMatrix {
    SymMatrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
}

pub fn example1() -> MatrixFamily {
    MatrixFamily::new(vec![
        sym(&[&[1.0, -1.0], &[-1.0, 1.0]]),
        sym(&[&[-2.0, 1.0], &[1.0, 1.0]]),
        sym(&[&[4.0, -3.0], &[-3.0, 1.0]]),
    ])
    .unwrap()
}

pub fn example2() -> MatrixFamily {
    MatrixFamily::new(vec![
        sym(&[&[-1.0, 0.0], &[0.0, 1.0]]),
        sym(&[&[1.0, 2.0], &[2.0, -2.0]]),
        sym(&[&[0.0, -2.0], &[-2.0, 1.0]]),
    ])
    .unwrap()
}

/// Entries uniform in `[-1, 1]`.
pub fn random_sym<R: Rng>(rng: &mut R, n: usize) -> SymMatrix {
    SymMatrix::from_upper_fn(n, |_, _| rng.gen_range(-1.0..=1.0))
}

pub fn gaussian<R: Rng>(rng: &mut R, k: usize) -> Vec<f64> {
    (0..k).map(|_| rng.sample(StandardNormal)).collect()
}

/// A family `Aᵢ = αᵢB₁ + βᵢB₂` with `n ≤ max_n`, `m ≤ max_m`. About one in
/// eight families has set rank one. The first two members are often the
/// basis matrices themselves.
pub fn random_rank2_family<R: Rng>(rng: &mut R, max_n: usize, max_m: usize) -> MatrixFamily {
    let n = rng.gen_range(1..=max_n);
    let m = rng.gen_range(1..=max_m);
    let b1 = random_sym(rng, n);
    let b2 = if rng.gen_bool(0.125) { b1.scaled(rng.gen_range(-2.0..=2.0)) } else { random_sym(rng, n) };
    let verbatim = rng.gen_bool(0.5);
    let members = (0..m)
        .map(|i| {
            let (a, b) = match (verbatim, i) {
                (true, 0) => (1.0, 0.0),
                (true, 1) => (0.0, 1.0),
                _ => (rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0)),
            };
            let mut x = b1.scaled(a);
            x.add_scaled(b, &b2);
            x
        })
        .collect();
    MatrixFamily::new(members).unwrap()
}

/// Full space half the time, otherwise a random subspace of dimension
/// `0..n` with a ray two times in three.
pub fn random_cone<R: Rng>(rng: &mut R, n: usize) -> FirstOrderCone {
    if rng.gen_bool(0.5) {
        return FirstOrderCone::full(n);
    }
    let k = rng.gen_range(0..n);
    let vectors: Vec<Vec<f64>> = (0..k).map(|_| gaussian(rng, n)).collect();
    let ray = rng.gen_bool(2.0 / 3.0).then(|| gaussian(rng, n));
    FirstOrderCone::new(n, &vectors, ray.as_deref()).unwrap()
}

/// A cone with a ray that is not absorbed into its subspace (`n ≥ 2`).
pub fn random_cone_with_ray<R: Rng>(rng: &mut R, n: usize) -> FirstOrderCone {
    loop {
        let k = rng.gen_range(0..n);
        let vectors: Vec<Vec<f64>> = (0..k).map(|_| gaussian(rng, n)).collect();
        let ray = gaussian(rng, n);
        let cone = FirstOrderCone::new(n, &vectors, Some(&ray)).unwrap();
        if cone.ray().is_some() {
            return cone;
        }
    }
}

/// A point of `cone` from Gaussian span coordinates, ray coordinate folded
/// to be nonnegative.
pub fn sample_in_cone<R: Rng>(rng: &mut R, cone: &FirstOrderCone) -> Vec<f64> {
    let k = cone.span_dim();
    let mut c = gaussian(rng, k);
    if cone.ray().is_some() {
        c[k - 1] = c[k - 1].abs();
    }
    cone.embed(&c)
}

/// KKT data (`n ≤ 4`, at most one equality, up to four inequalities) built
/// around a random stationary multiplier, so the multiplier set is nonempty.
pub fn random_kkt<R: Rng>(rng: &mut R) -> KktData {
    let n = rng.gen_range(1..=4);
    let p1 = rng.gen_range(0..=1);
    let p2 = rng.gen_range(1..=4);
    let grad_h: Vec<Vec<f64>> = (0..p1).map(|_| gaussian(rng, n)).collect();
    let grad_g: Vec<Vec<f64>> = (0..p2).map(|_| gaussian(rng, n)).collect();
    let g_values: Vec<f64> = (0..p2).map(|_| if rng.gen_bool(0.75) { 0.0 } else { -1.0 }).collect();
    let mut grad_f = vec![0.0; n];
    for h in &grad_h {
        let l: f64 = rng.gen_range(-1.0..1.0);
        grad_f.iter_mut().zip(h).for_each(|(f, v)| *f -= l * v);
    }
    for (g, &val) in grad_g.iter().zip(&g_values) {
        if val == 0.0 {
            let m: f64 = rng.gen_range(0.0..1.0);
            grad_f.iter_mut().zip(g).for_each(|(f, v)| *f -= m * v);
        }
    }
    KktData::new(KktSpec {
        grad_f,
        grad_h,
        grad_g,
        hess_f: Some(random_sym(rng, n)),
        hess_h: (0..p1).map(|_| random_sym(rng, n)).collect(),
        hess_g: (0..p2).map(|_| random_sym(rng, n)).collect(),
        g_values: Some(g_values),
        ..Default::default()
    })
    .unwrap()
}
