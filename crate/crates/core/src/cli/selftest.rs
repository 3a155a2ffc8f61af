use crate::error::Result;
use crate::experiments::{
    random_conjugator, random_hermitian, sample, sample_seed, Campaign, Ensemble, SampleConfig, DEFAULT_DIMS,
};
use crate::geodesic::{
    arc_length, delta_p, gamma_commute, geodesic_speed, geometric_mean, weighted_mean,
    GeodesicCurve, SimpsonGrid,
};
use crate::inequalities::{check_conde_2uc, check_distance_lower_bound, check_log_majorization_lemma, Inequality};
use crate::matcore::{conjugate, eigh, mat_exp, rel_fro_diff, SpdMatrix};

/// One named invariant check.
#[derive(Debug, Clone)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

const SAMPLES: u64 = 20;

// Extended-precision distance lower-bound gaps for A0 = [[2,1],[1,2]], B0 = diag(1,4).
const WITNESS: [(f64, f64); 5] = [
    (1.1, 0.047_896_316_967_964_57),
    (1.5, 0.040_279_990_851_328_38),
    (2.0, 0.035_662_036_220_850_48),
    (3.0, 0.031_409_394_459_565_98),
    (4.0, 0.029_364_020_668_725_72),
];

type Check = fn(u64) -> Result<Option<String>>;

/// Runs every check; a check passes when it returns `Ok(None)`.
pub fn run_selftest(seed: u64) -> Vec<CheckOutcome> {
    let checks: [(&'static str, Check); 11] = [
        ("eigh_reconstruction", eigh_reconstruction),
        ("exp_log_composition", exp_log_composition),
        ("power_additivity", power_additivity),
        ("geodesic_interpolation", geodesic_interpolation),
        ("speed_and_arc_length", speed_and_arc_length),
        ("mean_symmetry_and_inversion", mean_symmetry_and_inversion),
        ("distance_lower_bound_witness", witness),
        ("log_majorization_lemma", log_majorization),
        ("conjugation_invariance", conjugation_invariance),
        ("gamma_commuting_construction", gamma_construction),
        ("zero_violation_campaign", zero_violations),
    ];
    checks
        .iter()
        .map(|(name, f)| match f(seed) {
            Ok(None) => CheckOutcome {
                name,
                passed: true,
                detail: String::new(),
            },
            Ok(Some(detail)) => CheckOutcome {
                name,
                passed: false,
                detail,
            },
            Err(e) => CheckOutcome {
                name,
                passed: false,
                detail: e.to_string(),
            },
        })
        .collect()
}

fn rel(x: f64, y: f64) -> f64 {
    (x - y).abs() / y.abs().max(1.0)
}

fn generic(dim: usize, seed: u64) -> Result<SampleConfig> {
    SampleConfig::new(dim, 1.0, Ensemble::Generic, seed)
}

fn eigh_reconstruction(seed: u64) -> Result<Option<String>> {
    for &n in &DEFAULT_DIMS {
        for i in 0..SAMPLES {
            let h = random_hermitian(sample_seed(seed, i), n, 1.0);
            let e = eigh(&h)?;
            let err = rel_fro_diff(e.reconstruct().matrix(), h.matrix());
            if err > 1e-10 {
                return Ok(Some(format!("dim {n} sample {i}: reconstruction error {err:e}")));
            }
        }
    }
    Ok(None)
}

fn exp_log_composition(seed: u64) -> Result<Option<String>> {
    for &n in &DEFAULT_DIMS {
        for i in 0..SAMPLES {
            let a = sample(&generic(n, seed)?, i)?.a;
            let back = mat_exp(&a.log()?)?;
            let err = rel_fro_diff(back.matrix(), a.matrix());
            if err > 1e-9 {
                return Ok(Some(format!("dim {n} sample {i}: error {err:e}")));
            }
        }
    }
    Ok(None)
}

fn power_additivity(seed: u64) -> Result<Option<String>> {
    let grid = [-2.0, -0.7, 0.0, 0.5, 1.3, 2.0];
    for i in 0..SAMPLES {
        let a = sample(&generic(3, seed)?, i)?.a;
        for &s in &grid {
            for &t in &grid {
                let lhs = a.pow(s)?.matrix() * a.pow(t)?.matrix();
                let rhs = crate::matcore::mat_pow(&a, s + t)?;
                let err = rel_fro_diff(&lhs, rhs.matrix());
                if err > 1e-9 {
                    return Ok(Some(format!("sample {i} s={s} t={t}: error {err:e}")));
                }
            }
        }
    }
    Ok(None)
}

fn geodesic_interpolation(seed: u64) -> Result<Option<String>> {
    for &n in &DEFAULT_DIMS {
        for i in 0..SAMPLES {
            let s = sample(&generic(n, seed)?, i)?;
            for p in [1.5, 2.0, 3.0] {
                let d = delta_p(&s.a, &s.b, p)?;
                for t in [0.0, 0.25, 0.5, 0.75, 1.0] {
                    let dt = delta_p(&s.a, &weighted_mean(&s.a, &s.b, t)?, p)?;
                    if rel(dt, t * d) > 1e-9 {
                        return Ok(Some(format!("dim {n} sample {i} p={p} t={t}: {dt} vs {}", t * d)));
                    }
                }
            }
        }
    }
    Ok(None)
}

fn speed_and_arc_length(seed: u64) -> Result<Option<String>> {
    for i in 0..SAMPLES {
        let s = sample(&generic(3, seed)?, i)?;
        let g = GeodesicCurve::new(&s.a, &s.b)?;
        for p in [1.5, 2.0, 4.0] {
            let d = delta_p(&s.a, &s.b, p)?;
            let speeds = (0..=20)
                .map(|k| geodesic_speed(&g, k as f64 / 20.0, p))
                .collect::<Result<Vec<_>>>()?;
            let (lo, hi) = speeds.iter().fold((f64::INFINITY, 0.0_f64), |(l, h), &v| (l.min(v), h.max(v)));
            if (hi - lo) > 1e-8 * hi.max(1e-300) {
                return Ok(Some(format!("sample {i} p={p}: speed spread {lo}..{hi}")));
            }
            let len = arc_length(&g, p, SimpsonGrid::default())?;
            if rel(len, d) > 1e-6 {
                return Ok(Some(format!("sample {i} p={p}: arc length {len} vs {d}")));
            }
        }
    }
    Ok(None)
}

fn mean_symmetry_and_inversion(seed: u64) -> Result<Option<String>> {
    for i in 0..SAMPLES {
        let s = sample(&generic(3, seed)?, i)?;
        let m = geometric_mean(&s.a, &s.b)?;
        let err = rel_fro_diff(geometric_mean(&s.b, &s.a)?.matrix(), m.matrix());
        if err > 1e-9 {
            return Ok(Some(format!("sample {i}: A#B vs B#A {err:e}")));
        }
        let inv = geometric_mean(&s.a.inverse()?, &s.b.inverse()?)?;
        let err = rel_fro_diff(inv.matrix(), m.inverse()?.matrix());
        if err > 1e-9 {
            return Ok(Some(format!("sample {i}: inversion {err:e}")));
        }
    }
    Ok(None)
}

fn witness(_seed: u64) -> Result<Option<String>> {
    let a = SpdMatrix::from_real_rows(&[&[2.0, 1.0], &[1.0, 2.0]])?;
    let b = SpdMatrix::diag(&[1.0, 4.0])?;
    for (p, want) in WITNESS {
        let r = check_distance_lower_bound(&a, &b, p)?;
        if (r.gap - want).abs() > 1e-8 * want {
            return Ok(Some(format!("p={p}: gap {} vs oracle {want}", r.gap)));
        }
    }
    Ok(None)
}

fn log_majorization(seed: u64) -> Result<Option<String>> {
    for &n in &DEFAULT_DIMS {
        for i in 0..SAMPLES {
            let h = random_hermitian(sample_seed(seed, 2 * i), n, 1.0);
            let k = random_hermitian(sample_seed(seed, 2 * i + 1), n, 1.0);
            let r = check_log_majorization_lemma(&h, &k)?;
            if !r.verdict.holds {
                return Ok(Some(format!("dim {n} sample {i}: {:?}", r.verdict)));
            }
        }
    }
    Ok(None)
}

fn conjugation_invariance(seed: u64) -> Result<Option<String>> {
    for i in 0..SAMPLES {
        let s = sample(&generic(3, seed)?, i)?;
        let x = random_conjugator(sample_seed(seed ^ 0xC0, i), 3)?;
        let (ca, cb) = (conjugate(&x, &s.a)?, conjugate(&x, &s.b)?);
        for p in [1.5, 2.0, 3.0] {
            let (d, dc) = (delta_p(&s.a, &s.b, p)?, delta_p(&ca, &cb, p)?);
            if (d - dc).abs() > 1e-8 * (1.0 + d) {
                return Ok(Some(format!("sample {i} p={p}: {d} vs {dc}")));
            }
        }
    }
    Ok(None)
}

fn gamma_construction(seed: u64) -> Result<Option<String>> {
    for &n in &DEFAULT_DIMS {
        let config = SampleConfig::new(n, 1.0, Ensemble::GammaCommutingTriple, seed)?;
        for i in 0..SAMPLES {
            let s = sample(&config, i)?;
            let g = gamma_commute(&s.a, &s.b, &s.c, None)?;
            if !g.holds {
                return Ok(Some(format!("dim {n} sample {i}: {g:?}")));
            }
            let gap = check_conde_2uc(&s.a, &s.b, &s.c, 2.0)?.gap;
            if gap.abs() > 1e-8 {
                return Ok(Some(format!("dim {n} sample {i}: p=2 gap {gap:e} on a Γ-commuting triple")));
            }
        }
    }
    Ok(None)
}

fn zero_violations(seed: u64) -> Result<Option<String>> {
    let ensembles = [
        Ensemble::Generic,
        Ensemble::CommutingPair,
        Ensemble::CommutingTriple,
        Ensemble::GammaCommutingTriple,
        Ensemble::NearCommuting(0.2),
    ];
    for ensemble in ensembles {
        for &n in &DEFAULT_DIMS {
            let config = SampleConfig::new(n, 1.0, ensemble, seed)?;
            let rows = Campaign::applicable(config, &Inequality::ALL, &[1.1, 1.25, 1.5, 2.0, 3.0, 4.0], 5).run()?;
            if let Some(r) = rows.iter().find(|r| !r.satisfied) {
                return Ok(Some(format!(
                    "{ensemble} dim {n} index {}: {} p={} gap={:e}",
                    r.index, r.inequality, r.p, r.gap
                )));
            }
        }
    }
    Ok(None)
}
