//! Acceptance criteria 1-11. Prints one line per criterion and exits nonzero
//! if any criterion fails or exceeds its time budget.

mod common;

use std::time::{Duration, Instant};

use common::*;
use pak_core::coleman::{family_derivative, global_double_index, is_second_kind, residue_divisor, PointP1};
use pak_core::cube::{annihilation_table, random_samples, recursion_check, restriction_vanishing, GroupFunction, MPoly};
use pak_core::curvature::check_identities;
use pak_core::green::{random_element, synthetic_formula_case};
use pak_core::laurent::{double_index, substitute, A1Element, LaurentTrunc};
use pak_core::ledger::*;
use pak_core::padic::{assert_equal, make_extension_int, LogBranch, PadicElement};
use pak_core::qpoly::{q, qr};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn check(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn eq(x: &PadicElement, y: &PadicElement) -> bool {
    assert_equal(x, y, TARGET)
}

fn zero_ish(x: &PadicElement) -> bool {
    eq(x, &x.field().zero())
}

/// Independent residue of `F dG` for `F ∈ M`: coefficient of `z^{-1}` in
/// `f·(g' + b/z)`.
fn res_f_dg(f: &LaurentTrunc, g: &A1Element) -> PadicElement {
    let field = f.field().clone();
    let mut acc = field.zero();
    for i in f.low()..f.high() {
        let fi = f.coeff(i).unwrap();
        let j = -i; // need g coefficient at z^{j} with j·g_j·z^{j-1}, j−1 = −1−i
        if j >= g.f.low() && j < g.f.high() && j != 0 {
            acc = acc + fi * g.f.coeff(j).unwrap().scale_int(j);
        }
    }
    acc + f.coeff(0).unwrap() * g.a.clone()
}

fn c1() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let mut n = 0;
    for p in [2, 3, 5, 7] {
        let k = qp(p);
        for _ in 0..250 {
            let f = rand_a1(&k, &mut rng, 16, true);
            let g = rand_a1(&k, &mut rng, 16, true);
            let h = rand_a1(&k, &mut rng, 16, true);
            let fg = double_index(&f, &g).map_err(|e| e.to_string())?;
            let gf = double_index(&g, &f).map_err(|e| e.to_string())?;
            check(eq(&fg, &-gf.clone()), || format!("antisymmetry p={p}"))?;
            let (a, b) = (rand_elem(&k, &mut rng), rand_elem(&k, &mut rng));
            let comb = f.scale(&a).add(&h.scale(&b));
            let lhs = double_index(&comb, &g).map_err(|e| e.to_string())?;
            let rhs = a * fg + b * double_index(&h, &g).map_err(|e| e.to_string())?;
            check(eq(&lhs, &rhs), || format!("bilinearity p={p}"))?;
            let m = A1Element::new(f.f.clone(), k.zero());
            let r = double_index(&m, &g).map_err(|e| e.to_string())?;
            check(eq(&r, &res_f_dg(&m.f, &g)), || format!("reduction to Res F dG p={p}"))?;
            n += 1;
        }
    }
    Ok(format!("{n} pairs over p in {{2,3,5,7}}"))
}

fn c2() -> Outcome {
    use pak_core::coleman::MeromorphicForm;
    let mut rng = ChaCha8Rng::seed_from_u64(202);
    let mut n = 0;
    for p in [3, 5, 7] {
        let k = qp(p);
        let br = LogBranch::iwasawa(&k);
        let mut done = 0;
        while n < 50 && done < 17 {
            let a = rand_int(&mut rng, 500);
            if a == 0 {
                continue;
            }
            let w = MeromorphicForm::from_ints(&k, &[1], &[0, 1]).unwrap();
            let eta = MeromorphicForm::from_ints(&k, &[1], &[-a, 1]).unwrap();
            let g = global_double_index(&w, &eta, &br).map_err(|e| e.to_string())?;
            for (x, v) in &g.locals {
                let want = match x {
                    PointP1::Infinity => k.zero(),
                    PointP1::Finite(t) if t.is_zero() => -k.from_int(-a).log(&br).unwrap(),
                    PointP1::Finite(_) => k.from_int(a).log(&br).unwrap(),
                };
                check(eq(v, &want), || format!("local index at {x}, a={a}, p={p}"))?;
            }
            check(g.vanishes(TARGET), || format!("global sum, a={a}, p={p}"))?;
            done += 1;
            n += 1;
        }
    }
    Ok(format!("{n} values of a over p in {{3,5,7}}"))
}

fn c3() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(303);
    let mut n = 0;
    let mut max_deg = 1;
    for p in [2, 3, 5, 7] {
        let k = qp(p);
        let br = LogBranch::iwasawa(&k);
        for _ in 0..50 {
            let (w, e) = rand_form_pair(&k, &mut rng);
            let g = global_double_index(&w, &e, &br).map_err(|err| format!("p={p}: {err} for {w:?}"))?;
            max_deg = max_deg.max(g.field.degree());
            check(g.field.degree() <= 4, || "splitting field too large".into())?;
            check(g.vanishes(TARGET), || format!("nonzero global index p={p}: {:?}", g.total_local))?;
            n += 1;
        }
    }
    Ok(format!("{n} pairs, largest splitting field degree {max_deg}"))
}

fn c4() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(404);
    let mut count = 0;
    for i in 0..100 {
        let p = [2, 3, 5, 7][i % 4];
        let k = qp(p);
        let br = LogBranch::iwasawa(&k);
        let n = 1 + (i % 3) as i64;
        let f = rand_a1(&k, &mut rng, 24, true);
        let g = rand_a1(&k, &mut rng, 24, true);
        // α = a_n w^n + … with a unit leading coefficient
        let lead = loop {
            let c = rand_int(&mut rng, 30);
            if c != 0 && c % p as i64 != 0 {
                break c;
            }
        };
        let mut c: Vec<i64> = vec![lead];
        // f has order ≥ −4, so f(α)·dg(α) needs about 8n + 8 relative terms of α
        let rel = 8 * n + 12;
        c.extend((1..rel).map(|_| rand_int(&mut rng, 30)));
        let alpha = LaurentTrunc::from_ints(&k, n, &c, n + rel);
        let fa = substitute(&f, &alpha, &br).map_err(|e| e.to_string())?;
        let ga = substitute(&g, &alpha, &br).map_err(|e| e.to_string())?;
        let before = double_index(&f, &g).map_err(|e| e.to_string())?;
        let after = double_index(&fa, &ga).map_err(|e| e.to_string())?;
        check(eq(&after, &before.scale_int(n)), || format!("case {i}: n={n}, p={p}"))?;
        count += 1;
    }
    Ok(format!("{count} substitutions with n in {{1,2,3}}"))
}

fn c5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(505);
    for i in 0..50 {
        let p = [3, 5, 7][i % 3];
        let k = qp(p);
        let s0 = rand_int(&mut rng, 4);
        let fam = rand_third_kind_family(&mut rng, s0);
        let d = family_derivative(&k, &fam, &q(s0)).map_err(|e| format!("family {i}: {e}"))?;
        if d.body.num().is_zero() {
            continue;
        }
        check(is_second_kind(&d).map_err(|e| e.to_string())?, || format!("family {i} has residues"))?;
        let rd = residue_divisor(&d).map_err(|e| e.to_string())?;
        check(rd.iter().all(|(_, r)| zero_ish(r)), || format!("family {i}: residue divisor"))?;
    }
    Ok("50 families, every derivative of the second kind".into())
}

fn c6() -> Outcome {
    for g in 1..=5 {
        let r = check_identities(g).map_err(|e| e.to_string())?;
        check(r.all(), || format!("g={g}: {r:?}"))?;
    }
    Ok("g = 1..5, exact rationals".into())
}

fn c7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(707);
    for i in 0..20 {
        let p = [2, 3, 5, 7][i % 4];
        let g = 1 + (i % 3) as u32;
        let k = qp(p);
        let case = synthetic_formula_case(&k, g, &mut rng).map_err(|e| e.to_string())?;
        let got = case.evaluate().map_err(|e| e.to_string())?;
        check(eq(&got, &case.expected().unwrap()), || format!("table {i}: g={g}, p={p}"))?;
    }
    Ok("20 tables, g in {1,2,3}".into())
}

fn c8() -> Outcome {
    let f5 = qp(5);
    let br5 = LogBranch::iwasawa(&f5);
    let k = make_extension_int(&f5, &[-2, 0, 1]).map_err(|e| e.to_string())?;
    let s = k.generator().unwrap();
    let v = det_k_log(&f5.zero(), &[k.one(), s], &f5, &br5).map_err(|e| e.to_string())?;
    let want = f5.from_int(2).log(&br5).unwrap() * f5.from_ratio_i64(3, 2);
    check(eq(&v, &want), || "Q_5(sqrt 2) fixture".into())?;
    let mut rng = ChaCha8Rng::seed_from_u64(808);
    let mut n = 0;
    for (p, d) in [(5, 2), (7, 3), (3, 3)] {
        let base = qp(p);
        let br = LogBranch::iwasawa(&base);
        let ext = make_extension_int(&base, &[-d, 0, 1]).map_err(|e| e.to_string())?;
        let r = ext.generator().unwrap();
        let mut done = 0;
        while done < 7 {
            let c: Vec<i64> = (0..4).map(|_| rand_int(&mut rng, 20)).collect();
            if c[0] * c[3] - c[1] * c[2] == 0 {
                continue;
            }
            let b = [
                ext.from_int(c[0]) + r.clone() * ext.from_int(c[1]),
                ext.from_int(c[2]) + r.clone() * ext.from_int(c[3]),
            ];
            let res = trace_dual_check(&b, &base, &br).map_err(|e| e.to_string())?;
            check(zero_ish(&res), || format!("trace dual Q_{p}(sqrt {d})"))?;
            done += 1;
            n += 1;
        }
    }
    Ok(format!("Q_5(sqrt 2) fixture plus {n} random bases over 3 quadratic fields"))
}

fn c9() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(909);
    let gens = [q(2), q(3), qr(1, 2), q(-1), q(5), q(7), qr(10, 21), q(-12)];
    for p in [3, 5, 7] {
        let k = qp(p);
        let ell = IdeleCharacter::standard(&k, &[2, 3, 5, 7]).map_err(|e| e.to_string())?;
        let rep = validate_character(&ell, &gens).map_err(|e| e.to_string())?;
        check(rep.pass(), || format!("character p={p}"))?;
    }
    let k = qp(5);
    let ell = IdeleCharacter::standard(&k, &[2, 3, 7, 11]).map_err(|e| e.to_string())?;
    for i in 0..20 {
        let c = synthetic_principal_case(&ell, &mut rng).map_err(|e| e.to_string())?;
        let r = principal_check(&c, &ell).map_err(|e| e.to_string())?;
        check(r.pass(), || format!("principal case {i}"))?;
    }
    let line = MetrizedOFLine::inclusion(&k, qr(12, 7));
    let d0 = deg_metrized_line(&line, &ell).map_err(|e| e.to_string())?;
    let primes = [2i64, 3, 5, 7, 11];
    for i in 0..20 {
        let mut f = q(if rng.gen_bool(0.5) { 1 } else { -1 });
        for &pr in &primes {
            let e: i32 = rng.gen_range(-2..=2);
            f *= qr(pr, 1).pow(e);
        }
        let d = deg_metrized_line(&line.rebase(&f), &ell).map_err(|e| e.to_string())?;
        check(eq(&d, &d0), || format!("re-basing {i} by {f}"))?;
    }
    Ok("p in {3,5,7}; 20 principal cases; 20 re-basings".into())
}

fn c10() -> Outcome {
    let k = qp(7);
    let br = LogBranch::iwasawa(&k);
    let l2 = k.from_int(2).log(&br).unwrap();
    let st = RescaleState {
        field: k.clone(),
        place: "p".into(),
        ll: k.from_int(4),
        lw: k.from_int(-3),
        ww: k.from_int(11),
    };
    let mut grid = 0;
    for c in [k.one(), -k.one(), l2.clone(), -l2.clone()] {
        for d in -5..=5i64 {
            for g in 1..=5u32 {
                let r = rr_rescale_invariance(&st, "p", &c, d, g).map_err(|e| e.to_string())?;
                check(eq(&r.delta_lhs, &r.delta_rhs), || format!("rescale c, d={d}, g={g}"))?;
                let closed = c.clone() * k.from_ratio_i64(-d * (d - 2 * g as i64 + 1), 2);
                check(eq(&r.delta_rhs, &closed), || format!("closed form d={d}, g={g}"))?;
                grid += 1;
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(1010);
    for i in 0..20 {
        let p = [3, 5, 7][i % 3];
        let field = qp(p);
        let g = 1 + (i % 3) as u32;
        let (st, d) = synthetic_surface(&field, g, &mut rng).map_err(|e| e.to_string())?;
        let rr = rr_delta_check(&d, &st).map_err(|e| e.to_string())?;
        check(zero_ish(&rr.residual), || format!("rr_delta state {i}"))?;
        let base = adjunction_check(&st).map_err(|e| e.to_string())?.residual;
        check(zero_ish(&base), || format!("adjunction state {i}"))?;
        // Entry between two points of E: only d_∞ moves, by 2c·m·m'.
        let c = random_element(&field, &mut rng);
        let mut pert = st.clone();
        let t = pert.curve.table_mut("p").unwrap();
        let old = t.get("H0", "H1").unwrap().clone();
        t.set("H0", "H1", old + c.clone());
        let r1 = adjunction_check(&pert).map_err(|e| e.to_string())?.residual;
        let (m0, m1) = (st.e.components["H0"], st.e.components["H1"]);
        check(eq(&(r1 - base.clone()), &(-c.scale_int(2 * m0 * m1))), || format!("E-E response {i}"))?;
        // Entry between a point of ω and a point of E: only ω·E moves, by c·m·m'.
        let mut pert = st.clone();
        let t = pert.curve.table_mut("p").unwrap();
        let old = t.get("H3", "H0").unwrap().clone();
        t.set("H3", "H0", old + c.clone());
        let r2 = adjunction_check(&pert).map_err(|e| e.to_string())?.residual;
        let mw = st.omega.components.get("H3").copied().unwrap_or(0);
        check(eq(&(r2 - base), &c.scale_int(mw * m0)), || format!("omega-E response {i}"))?;
    }
    Ok(format!("{grid} grid points; 20 states; linear responses match"))
}

fn c11() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1111);
    for (n, d, r) in annihilation_table(2, 5, 6, &mut rng) {
        check(r.pass(), || format!("D^{n} on degree {d}"))?;
    }
    for n in 1..=5 {
        let f = GroupFunction::polynomial(MPoly::random(2, 5, &mut rng));
        let s = random_samples(f.model, n, 12, &mut rng);
        check(recursion_check(&f, &s).pass(), || format!("recursion n={n}"))?;
        for i in 0..n {
            check(restriction_vanishing(&f, i, &s).unwrap().pass(), || format!("restriction n={n}, i={i}"))?;
        }
    }
    Ok("monomials of degree < n for n <= 5; recursion and restriction n <= 5".into())
}

fn main() {
    let criteria: [(u32, &str, u64, fn() -> Outcome); 11] = [
        (1, "double index closed form", 5, c1),
        (2, "base index locals", 5, c2),
        (3, "global index vanishes on P^1", 60, c3),
        (4, "substitution scaling", 10, c4),
        (5, "family derivative is second kind", 10, c5),
        (6, "curvature identities", 1, c6),
        (7, "Green formula reproduction", 5, c7),
        (8, "determinant metrics", 10, c8),
        (9, "idele character ledger", 10, c9),
        (10, "Riemann-Roch normalization and adjunction", 10, c10),
        (11, "cube difference operators", 5, c11),
    ];
    let filter: Option<u32> = std::env::args().skip(1).find_map(|a| a.parse().ok());
    let mut failed = 0;
    for (id, name, budget, f) in criteria {
        if filter.is_some_and(|x| x != id) {
            continue;
        }
        let t0 = Instant::now();
        let out = f();
        let dt = t0.elapsed();
        let in_time = dt <= Duration::from_secs(budget);
        let (status, detail) = match (&out, in_time) {
            (Ok(d), true) => ("PASS", d.clone()),
            (Ok(d), false) => ("FAIL", format!("{d}; over the {budget} s budget")),
            (Err(e), _) => ("FAIL", e.clone()),
        };
        if status == "FAIL" {
            failed += 1;
        }
        println!(
            "criterion {id:>2} {status} {:>8.3}s (budget {budget:>2}s)  {name}: {detail}",
            dt.as_secs_f64()
        );
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
    println!("all criteria passed");
}
