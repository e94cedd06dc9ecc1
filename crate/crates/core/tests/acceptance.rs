//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails. Run with `cargo test --test acceptance`.

use std::time::{Duration, Instant};

use cayley_core::arith;
use cayley_core::cayley::{self, LineP3};
use cayley_core::count::{self, ExperimentOptions, Variety};
use cayley_core::cubic::{self, CubicSurface, RationalLine, StructureOptions};
use cayley_core::detmethod::{self, OmegaOptions};
use cayley_core::heights;
use cayley_core::hilbert;
use cayley_core::poly::{macaulay_resultant, monomials_of_degree, parse_poly_auto, rat, Monomial, MultiPoly};
use cayley_core::report::{fit_exponent, ExperimentReport};
use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Suite {
    failures: usize,
    total: usize,
}

impl Suite {
    fn record(&mut self, id: &str, what: &str, ok: bool, detail: String, elapsed: Duration) {
        self.total += 1;
        if !ok {
            self.failures += 1;
        }
        let tag = if ok { "PASS" } else { "FAIL" };
        println!("{tag} {id:<4} {what} [{detail}] ({:.1} s)", elapsed.as_secs_f64());
    }
}

fn p(s: &str, n: usize) -> MultiPoly {
    parse_poly_auto(s, n).unwrap()
}

fn random_form(rng: &mut ChaCha8Rng, degree: u32) -> MultiPoly {
    loop {
        let f = MultiPoly::from_terms(4, monomials_of_degree(4, degree).into_iter().map(|m| (m, rat(rng.gen_range(-3..=3)))));
        if f.total_degree() == Some(degree) {
            return f;
        }
    }
}

/// Random conic `(Q, l)` whose plane section is a genuine conic.
fn random_conic(rng: &mut ChaCha8Rng) -> (MultiPoly, MultiPoly) {
    loop {
        let q = random_form(rng, 2);
        let l = random_form(rng, 1);
        if cayley::cayley_plane_curve(&q, &l).is_ok_and(|psi| psi.degree() == 2) {
            return (q, l);
        }
    }
}

fn exact_identities(s: &mut Suite) {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let t = Instant::now();
    let mut bad = 0;
    for _ in 0..10_000 {
        let num: i64 = rng.gen_range(-1_000_000_000..=1_000_000_000);
        let den: i64 = rng.gen_range(1..=1_000_000_000);
        if num == 0 {
            continue;
        }
        let x = BigRational::new(num.into(), den.into());
        if !heights::product_formula_check(&x).unwrap() {
            bad += 1;
        }
    }
    s.record("1a", "product formula on 10^4 random rationals", bad == 0, format!("{bad} mismatches"), t.elapsed());

    let t = Instant::now();
    let mut checked = 0;
    let mut bad = 0;
    for n in 1..=3usize {
        let k = n + 1;
        for code in 0..3usize.pow(k as u32) {
            let degs: Vec<u32> = (0..k).map(|i| ((code / 3usize.pow(i as u32)) % 3 + 1) as u32).collect();
            let forms: Vec<MultiPoly> = degs.iter().enumerate().map(|(i, &d)| MultiPoly::from_terms(k, [(Monomial((0..k).map(|j| if j == i { d } else { 0 }).collect()), rat(1))])).collect();
            checked += 1;
            if macaulay_resultant(&forms).map(|r| r.constant_value()) != Ok(rat(1)) {
                bad += 1;
            }
        }
    }
    s.record("1b", "Res(T0^d0, ..., Tn^dn) = 1 for d_i <= 3, n <= 3", bad == 0, format!("{checked} tuples, {bad} mismatches"), t.elapsed());

    let t = Instant::now();
    let psi = cayley::cayley_plane_curve(&p("T2", 4), &p("T3", 4)).unwrap();
    let line = LineP3::from_forms(&p("T2", 4), &p("T3", 4)).unwrap();
    let inc = cayley::incidence_form(&line);
    let p01 = MultiPoly::var(6, cayley::pair_index(0, 1));
    let ok = psi == inc && psi.poly == p01;
    s.record("1c", "Cayley form of V(T2, T3) equals its incidence form p01", ok, psi.to_text(), t.elapsed());

    let t = Instant::now();
    let mut bad = 0;
    for _ in 0..20 {
        let (q, l) = random_conic(&mut rng);
        let h = BigRational::new(rng.gen_range(1..=7).into(), rng.gen_range(1..=7).into());
        let psi = cayley::cayley_plane_curve(&q, &l).unwrap();
        let moved = cayley::transform_fh(&psi, &h).unwrap();
        let round_trip = cayley::transform_fh(&moved, &h.recip()).unwrap() == psi;
        let q2 = cayley::apply_fh_to_form(&q, &h).unwrap();
        let l2 = cayley::apply_fh_to_form(&l, &h).unwrap();
        let recomputed = cayley::cayley_plane_curve(&q2, &l2).unwrap() == moved;
        if !(round_trip && recomputed) {
            bad += 1;
        }
    }
    s.record("1d", "F_H round trip and recomputation on 20 random conics", bad == 0, format!("{bad} mismatches"), t.elapsed());

    let t = Instant::now();
    let mut bad = 0;
    for _ in 0..20 {
        let (q, l) = random_conic(&mut rng);
        let a: [BigInt; 3] = std::array::from_fn(|_| BigInt::from(rng.gen_range(-3..=3)));
        let psi = cayley::plane_curve_form_raw(&q, &l).unwrap();
        let q2 = cayley::transform_ta(&q, &a).unwrap();
        let l2 = cayley::transform_ta(&l, &a).unwrap();
        let psi2 = cayley::plane_curve_form_raw(&q2, &l2).unwrap();
        if !cayley::top_part_check(&psi, &psi2, 2) {
            bad += 1;
        }
    }
    s.record("1e", "T_a leaves the top part unchanged on 20 random conics", bad == 0, format!("{bad} mismatches"), t.elapsed());

    let t = Instant::now();
    let fermat = CubicSurface::new(&p("T0^3 + T1^3 + T2^3 + T3^3", 4)).unwrap();
    let line = RationalLine::certify(&fermat.f, &LineP3::new(&[1, 1, 0, 0], &[0, 0, 1, 1]).unwrap()).unwrap();
    let (plane, conic) = cubic::residual_conic(&line, (&rat(1), &rat(0))).unwrap();
    let want_plane = p("T0 + T1", 4);
    let want_conic = p("T2^2 - T2*T3 + T3^2", 4);
    let same = |a: &MultiPoly, b: &MultiPoly| a == b || *a == b.scale(&rat(-1));
    let ok = same(&plane, &want_plane) && same(&conic, &want_conic);
    s.record("1f", "Fermat residual conic at t = (1, 0)", ok, format!("plane {}, conic {}", plane.to_text(&names()), conic.to_text(&names())), t.elapsed());
}

fn names() -> Vec<String> {
    (0..4).map(|i| format!("T{i}")).collect()
}

fn combinatorial_scans(s: &mut Suite) {
    let t = Instant::now();
    let mut bad = Vec::new();
    for d in 1..=4 {
        for mu in 1..=6 {
            let r = hilbert::q_lower_bound_check(d, mu, 10_000).unwrap();
            if !r.violations.is_empty() {
                bad.push((d, mu));
            }
        }
    }
    let el = t.elapsed();
    s.record("2a", "local Hilbert-Samuel lower bound, d <= 4, mu <= 6, m <= 10^4", bad.is_empty() && el < Duration::from_secs(120), format!("failing (d, mu): {bad:?}"), el);

    let t = Instant::now();
    let mut bad = Vec::new();
    for d in 1..=3 {
        for delta in 2..=10 {
            for big_d in delta as u64..=200 {
                let w = hilbert::geometric_hs_window(d, delta, big_d).unwrap();
                if !(w.lower_ok && w.upper_ok) {
                    bad.push((d, delta, big_d));
                }
            }
        }
    }
    let el = t.elapsed();
    s.record("2b", "geometric Hilbert-Samuel window, d <= 3, delta <= 10, D <= 200", bad.is_empty() && el < Duration::from_secs(120), format!("{} failures", bad.len()), el);

    let t = Instant::now();
    let scan = arith::divisor_prime_sum_scan(1_000_000);
    let el = t.elapsed();
    s.record(
        "2c",
        "prime sum over divisors <= log log N(a) + 2 for 2 <= |a| <= 10^6",
        scan.violations.is_empty() && el < Duration::from_secs(120),
        format!("{} violations, min slack {:.4} at {}", scan.violations.len(), scan.min_slack, scan.argmin),
        el,
    );
}

fn structural(s: &mut Suite) {
    let surfaces = cubic::corpus();
    let opts = StructureOptions::default();
    let mut reports = Vec::new();
    let mut slowest = Duration::ZERO;
    let t = Instant::now();
    for x in &surfaces {
        let t1 = Instant::now();
        reports.push(cubic::structure_report(x, &opts).unwrap());
        slowest = slowest.max(t1.elapsed());
    }
    let el = t.elapsed();
    let n = surfaces.len();
    let size_ok = n >= 10 && slowest < Duration::from_secs(300);
    let count = |f: &dyn Fn(&cubic::StructureReport) -> bool| reports.iter().filter(|r| f(r)).count();

    let degs: Vec<u32> = reports.iter().map(|r| r.family.degree).collect();
    let ok = count(&|r| r.degree_two_gcd_one);
    s.record("3a", "b_IJ of degree exactly 2 with gcd 1", size_ok && ok == n, format!("{ok}/{n} surfaces; observed degrees {degs:?}"), el);

    let ok = count(&|r| r.nonvanishing);
    s.record("3b", "b-family nonvanishing at 10^3 sampled t", size_ok && ok == n, format!("{ok}/{n} surfaces"), Duration::ZERO);

    let ranks: Vec<usize> = reports.iter().map(|r| r.leading.rank).collect();
    let ok = count(&|r| r.rank_two_or_three && r.image_matches_rank);
    s.record("3c", "a-family rank in {2, 3} with matching image shape", size_ok && ok == n, format!("{ok}/{n} surfaces; observed ranks {ranks:?}"), Duration::ZERO);

    let slopes: Vec<String> = reports.iter().map(|r| format!("{:.3}", r.pairing.slope)).collect();
    let ok = count(&|r| r.pairing_bounded);
    s.record("3d", "height pairing residual slope in [-0.1, 0.1]", size_ok && ok == n, format!("{ok}/{n} surfaces; slopes {}", slopes.join(" ")), Duration::ZERO);
}

fn determinant_method(s: &mut Suite) {
    let o = OmegaOptions::default();
    let t = Instant::now();
    let line = Variety::hypersurface(&p("x2", 3)).unwrap();
    let conic = Variety::hypersurface(&p("x0*x2 - x1^2", 3)).unwrap();
    let wl = detmethod::minimal_omega(&line, 1, &o).unwrap().omega;
    let wc = detmethod::minimal_omega(&conic, 2, &o).unwrap().omega;
    let el = t.elapsed();
    s.record("4a", "minimal omega: line at B = 1 is 4, conic at B = 2 is 2", wl == 4 && wc == 2 && el < Duration::from_secs(120), format!("line {wl}, conic {wc}"), el);

    let t = Instant::now();
    let (reps, fit) = detmethod::omega_growth(&conic, &[4, 16, 64], &o).unwrap();
    let el = t.elapsed();
    let omegas: Vec<u32> = reps.iter().map(|r| r.omega).collect();
    let ok = fit.is_some_and(|a| (a - 1.0).abs() <= 0.15) && el < Duration::from_secs(120);
    s.record("4b", "conic omega growth exponent 1 +- 0.15 over B = 4, 16, 64", ok, format!("omega {omegas:?}, exponent {fit:.3?}"), el);
}

fn counting(s: &mut Suite) {
    let start = Instant::now();
    let bs = [10u64, 100, 1000, 10_000, 100_000];
    let mut worst = f64::NEG_INFINITY;
    let mut complete = true;
    for x in cubic::corpus() {
        let line = cubic::find_lines(&x, 2, 1 << 24).unwrap().remove(0);
        let pencil = cubic::conic_family_unchecked(&x, &line).unwrap();
        let rows: Vec<_> = bs.iter().map(|&b| cubic::conic_census(&pencil, b, 1 << 16).unwrap()).collect();
        complete &= rows.iter().all(|r| r.certified_complete);
        let xs: Vec<f64> = bs.iter().map(|&b| b as f64).collect();
        let ys: Vec<f64> = rows.iter().map(|r| r.count as f64).collect();
        if let Some((a, _)) = fit_exponent(&xs, &ys) {
            worst = worst.max(a);
        }
    }
    s.record("5a", "conic census growth exponent <= 1.15", worst <= 1.15 && complete, format!("largest exponent over the corpus {worst:.3}, complete {complete}"), start.elapsed());

    let opts = ExperimentOptions::default();
    let t = Instant::now();
    let fermat = CubicSurface::new(&p("T0^3 + T1^3 + T2^3 + T3^3", 4)).unwrap();
    let e = count::points_on_conics_experiment(&fermat, &[16, 32, 64, 128, 256], &opts).unwrap();
    let fit = e.fitted_exponent.as_ref().map(|f| f.value);
    let counts: Vec<u64> = e.rows.iter().map(|r| r.off_lines).collect();
    let ok = fit.is_some_and(|a| a <= 1.85) && e.bound_inequality_holds != Some(false);
    s.record(
        "5b",
        "Fermat off-line points: exponent <= 1.85, count below the bound",
        ok,
        format!("counts {counts:?}, exponent {fit:.3?} vs overlay {:.4}, bound holds {:?}", e.overlay_exponent.value, e.bound_inequality_holds),
        t.elapsed(),
    );

    let t = Instant::now();
    let e = count::integral_conics_experiment(&p("x1^3 + x2^3 + x3^3 - x0^3", 4), &[32, 64, 128, 256], &opts).unwrap();
    let fit = e.fitted_exponent.as_ref().map(|f| f.value);
    let counts: Vec<u64> = e.rows.iter().map(|r| r.off_lines).collect();
    s.record(
        "5c",
        "affine x^3 + y^3 + z^3 = 1 off-line points: exponent <= 1.15",
        fit.is_some_and(|a| a <= 1.15),
        format!("counts {counts:?}, exponent {fit:.3?} vs overlay {:.4}", e.overlay_exponent.value),
        t.elapsed(),
    );
    let total = start.elapsed();
    s.record("5*", "counting experiments within 30 min", total < Duration::from_secs(1800), String::new(), total);
}

fn report_json() -> String {
    let x = &cubic::corpus()[0];
    let opts = StructureOptions { nonvanishing_samples: 100, pairing_samples: 50, ..Default::default() };
    let structure = cubic::structure_report(x, &opts).unwrap();
    let e = count::points_on_conics_experiment(x, &[4, 8, 16], &ExperimentOptions::default()).unwrap();
    let mut r = ExperimentReport::new("acceptance").input("seed", opts.seed);
    r.results = serde_json::json!({"structure": structure, "experiment": e});
    r.to_json()
}

fn reproducibility(s: &mut Suite) {
    let t = Instant::now();
    let (a, b) = (report_json(), report_json());
    s.record("6", "identical inputs and seed give byte-identical JSON", a == b, format!("{} bytes", a.len()), t.elapsed());
}

fn main() {
    let mut s = Suite { failures: 0, total: 0 };
    let t = Instant::now();
    exact_identities(&mut s);
    let el = t.elapsed();
    s.record("1*", "exact identities within 60 s", el < Duration::from_secs(60), String::new(), el);
    combinatorial_scans(&mut s);
    structural(&mut s);
    determinant_method(&mut s);
    counting(&mut s);
    reproducibility(&mut s);
    println!("{} of {} criteria passed", s.total - s.failures, s.total);
    if s.failures > 0 {
        std::process::exit(1);
    }
}
