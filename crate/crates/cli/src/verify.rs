//! Self-checks run by `qpe verify`.

use qpe_core::cobordism::{compose, CobMorphism, FlatTangle};
use qpe_core::colored_links::{
    framing_check, invariance_spotcheck, merging_check, trace_closure, BracketOptions, Braid, Closure, ColoredDiagram, FamilyEntry,
};
use qpe_core::complexes::{direct_sum, shift, simplify, tensor, Complex};
use qpe_core::homology::{closed_homology, ext_groups, BigradedGroups, Group};
use qpe_core::projectors::{build_qn, q2, q3, truncated_pn, turnback_check, QuasiProjectorSpec};
use qpe_core::series::TruncatedSeries;
use qpe_core::temperley_lieb::{euler_characteristic, jw, tl_mul, Matching, TLElement};
use qpe_core::Result;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::collections::BTreeMap;

pub const SUITES: &[&str] = &["tl", "cobordism", "end", "q2", "q3", "p2", "gor", "framing", "merging", "invariance", "convolution"];

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub suite: String,
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

pub struct Settings {
    pub precision: i32,
    pub window: i32,
    pub seed: u64,
}

fn check(suite: &str, name: &str, r: Result<(bool, String)>) -> Check {
    let (passed, detail) = r.unwrap_or_else(|e| (false, format!("error: {}", e)));
    Check { suite: suite.into(), name: name.into(), passed, detail }
}

pub fn run(suite: &str, s: &Settings) -> Vec<Check> {
    match suite {
        "tl" => tl(s),
        "cobordism" => cobordism(s),
        "end" => vec![check("end", "END(1_1) = Z + q^2 Z", end_one())],
        "q2" => qn_checks("q2", &q2(), 2, s.precision).into_iter().chain([check("q2", "Q2 x Q2 = Q2 + t^-3 q^4 Q2", idempotency())]).collect(),
        "q3" => qn_checks("q3", &q3(), 3, s.precision),
        "p2" => vec![check("p2", "Ext of P2 in the safe window", p2_ext(s.window.max(9)))],
        "gor" => vec![check("gor", "END(P2) against Z[u1,u2]/(u1^2) x L[x2], d x2 = 2 u1 u2", gor(s.window.max(9)))],
        "framing" => framing(s.window),
        "merging" => merging(s.window),
        "invariance" => invariance(s.window),
        "convolution" => convolution(s.window.max(8)),
        _ => vec![],
    }
}

fn tl(s: &Settings) -> Vec<Check> {
    let p = s.precision;
    let mut out = vec![check("tl", "e_i relations", (|| {
        let delta = TruncatedSeries::loop_value();
        for n in 2..=4 {
            for i in 1..n {
                let e = TLElement::e(n, i);
                if !tl_mul(&e, &e)?.eq_to_precision(&e.scale_series(&delta)) {
                    return Ok((false, format!("e_{}^2 on {} strands", i, n)));
                }
                if i + 1 < n {
                    let f = TLElement::e(n, i + 1);
                    if !tl_mul(&tl_mul(&e, &f)?, &e)?.eq_to_precision(&e) || !tl_mul(&tl_mul(&f, &e)?, &f)?.eq_to_precision(&f) {
                        return Ok((false, format!("e_{} e_{} e_{} on {} strands", i, i + 1, i, n)));
                    }
                }
                for j in i + 2..n {
                    let f = TLElement::e(n, j);
                    if !tl_mul(&e, &f)?.eq_to_precision(&tl_mul(&f, &e)?) {
                        return Ok((false, format!("e_{} e_{} on {} strands", i, j, n)));
                    }
                }
            }
        }
        Ok((true, String::new()))
    })())];
    for n in 1..=4 {
        out.push(check("tl", &format!("jw({}) kills turnbacks and is idempotent", n), (|| {
            let q = jw(n, p)?;
            for i in 1..n {
                let e = TLElement::e(n, i);
                if !tl_mul(&q, &e)?.is_zero_to_precision() || !tl_mul(&e, &q)?.is_zero_to_precision() {
                    return Ok((false, format!("jw({}) e_{} != 0", n, i)));
                }
            }
            Ok((tl_mul(&q, &q)?.eq_to_precision(&q), format!("precision {}", p)))
        })()));
    }
    out
}

fn random_morphism(rng: &mut ChaCha8Rng, x: &FlatTangle, y: &FlatTangle) -> CobMorphism {
    let m = CobMorphism::zero(x.clone(), y.clone());
    let curves = m.curve_count();
    let mask = if curves == 0 { 0 } else { rng.gen::<u64>() & ((1u64 << curves) - 1) & rng.gen::<u64>() };
    CobMorphism::basis(x.clone(), y.clone(), mask)
}

fn cobordism(s: &Settings) -> Vec<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(s.seed);
    let mut bad = None;
    let trials = 2000;
    for t in 0..trials {
        let n = rng.gen_range(1..=3);
        let all = Matching::all_square(n);
        let pick = |rng: &mut ChaCha8Rng| FlatTangle::new(all[rng.gen_range(0..all.len())].clone());
        let (w, x, y, z) = (pick(&mut rng), pick(&mut rng), pick(&mut rng), pick(&mut rng));
        let (f, g, h) = (random_morphism(&mut rng, &w, &x), random_morphism(&mut rng, &x, &y), random_morphism(&mut rng, &y, &z));
        let ok = (|| -> Result<bool> {
            let left = compose(&compose(&h, &g)?, &f)?;
            let right = compose(&h, &compose(&g, &f)?)?;
            let gf = compose(&g, &f)?;
            let additive = gf.is_zero() || gf.degree() == Some(g.degree().unwrap() + f.degree().unwrap());
            let dot = CobMorphism::dotted_identity(&x, rng.gen_range(0..2 * n));
            Ok(left == right && additive && compose(&dot, &dot)?.is_zero())
        })();
        if !matches!(ok, Ok(true)) {
            bad = Some(t);
            break;
        }
    }
    vec![check(
        "cobordism",
        "associativity, degree additivity, dot squared",
        Ok(match bad {
            None => (true, format!("{} random composites, seed {}", trials, s.seed)),
            Some(t) => (false, format!("failed at trial {}", t)),
        }),
    )]
}

fn groups(entries: &[(i32, i32, Group)]) -> BigradedGroups {
    let mut g = BigradedGroups::new();
    for (h, q, x) in entries {
        g.insert(*h, *q, x.clone());
    }
    g
}

fn end_one() -> Result<(bool, String)> {
    let one = Complex::identity(1);
    let g = ext_groups(&one, &one, -4, 4, false)?;
    let want = groups(&[(0, 0, Group::free(1)), (0, 2, Group::free(1))]);
    Ok((g == want, g.to_string().trim().replace('\n', "; ")))
}

fn qn_checks(suite: &str, c: &Complex, n: usize, prec: i32) -> Vec<Check> {
    vec![
        check(suite, &format!("Q{} is a complex", n), c.check().map(|_| (true, String::new()))),
        check(suite, &format!("Q{} kills turnbacks", n), turnback_check(c).map(|r| (r.kills_all(), format!("{} tensor products", r.entries.len())))),
        check(suite, &format!("chi(Q{}) = (1 - q^{}) jw({})", n, 2 * n, n), (|| {
            let chi = euler_characteristic(c, prec)?;
            let mut f = TruncatedSeries::one();
            f.add_term(2 * n as i32, (-1).into());
            let want = jw(n, prec)?.scale_series(&f);
            Ok((chi.eq_to_precision(&want), format!("precision {}", prec)))
        })()),
    ]
}

fn idempotency() -> Result<(bool, String)> {
    let q = q2();
    let s = simplify(&tensor(&q, &q)?);
    let want = direct_sum(&q, &shift(&q, -3, 4))?;
    let ranks = s.graded_ranks() == want.graded_ranks();
    let h1 = closed_homology(&trace_closure(&s, None)?)?;
    let h2 = closed_homology(&trace_closure(&want, None)?)?;
    Ok((ranks && h1 == h2, format!("ranks {}, closures {}", ranks, h1 == h2)))
}

fn p2_ext(window: i32) -> Result<(bool, String)> {
    let p = truncated_pn(2, window)?;
    let from = p.valid_from();
    let g = ext_groups(&Complex::identity(2), &p.complex, from, 0, false)?;
    let mut ok = g.get(0, 0) == Group::free(1) && g.get(-2, 4) == Group::free(1);
    for ((h, q), x) in g.iter() {
        if (h + q == 1 || h + q == 3) && !x.is_zero() {
            ok = false;
        }
    }
    Ok((ok, format!("degrees {}..0", from)))
}

/// Homology of `Z[u1,u2]/(u1^2) x L[x2]` with `d x2 = 2 u1 u2`, in closed form.
pub fn w2_homology(lo: i32, hi: i32) -> BigradedGroups {
    let mut g = BigradedGroups::new();
    g.insert(0, 2, Group::free(1));
    for b in 0.. {
        if -2 * b < lo && -3 - 2 * b < lo {
            break;
        }
        g.insert(-2 * b, 4 * b, Group::free(1));
        if b >= 1 {
            g.insert(-2 * b, 2 + 4 * b, Group { rank: 0, torsion: vec![2.into()] });
        }
        g.insert(-3 - 2 * b, 8 + 4 * b, Group::free(1));
    }
    g.restrict(lo, hi)
}

fn gor(window: i32) -> Result<(bool, String)> {
    let p = truncated_pn(2, window)?;
    let from = p.valid_from();
    let g = ext_groups(&Complex::identity(2), &p.complex, from, 0, false)?;
    Ok((g == w2_homology(from, 0), format!("degrees {}..0", from)))
}

fn framing(window: i32) -> Vec<Check> {
    [(1, vec![1]), (2, vec![2]), (3, vec![3])]
        .into_iter()
        .map(|(n, idx)| {
            check("framing", &format!("full twist on Q{}", n), (|| {
                let r = framing_check(n, &QuasiProjectorSpec::new(n, idx)?, window)?;
                Ok((r.passed(), format!("expected {:?}, observed {:?}", r.expected, r.observed)))
            })())
        })
        .collect()
}

fn merging(window: i32) -> Vec<Check> {
    [(2, vec![2]), (2, vec![1]), (2, vec![]), (1, vec![1])]
        .into_iter()
        .map(|(n, idx)| {
            check("merging", &format!("two marks vs one, n = {}, indices {:?}", n, idx), (|| {
                let r = merging_check(n, &QuasiProjectorSpec::new(n, idx)?, window)?;
                Ok((r.passed, format!("factor {}", r.factor)))
            })())
        })
        .collect()
}

pub fn diagram(strands: usize, word: Vec<i32>, closure: Closure, color: usize, framing: i32, indices: Vec<usize>) -> ColoredDiagram {
    let mut family = BTreeMap::new();
    family.insert(color.to_string(), FamilyEntry { indices });
    ColoredDiagram {
        braid: Braid { strands, word },
        closure,
        colors: vec![color],
        framings: vec![framing],
        marks: vec![1],
        family,
        reversed: vec![],
    }
}

/// Three presentations each of the 1- and 2-colored unknot and the trefoil.
pub fn presentations() -> Vec<(&'static str, Vec<ColoredDiagram>)> {
    let unknots = |c: usize, idx: Vec<usize>| {
        vec![
            diagram(1, vec![], Closure::Trace, c, 0, idx.clone()),
            diagram(2, vec![1, -1], Closure::Plat, c, 0, idx.clone()),
            diagram(2, vec![1], Closure::Trace, c, 0, idx),
        ]
    };
    vec![
        ("1-colored unknot", unknots(1, vec![])),
        ("2-colored unknot", unknots(2, vec![2])),
        (
            "trefoil",
            vec![
                diagram(2, vec![1, 1, 1], Closure::Trace, 1, 0, vec![]),
                diagram(3, vec![1, 2, 1, 2], Closure::Trace, 1, 0, vec![]),
                diagram(3, vec![1, 1, 1, 2], Closure::Trace, 1, 0, vec![]),
            ],
        ),
    ]
}

fn invariance(window: i32) -> Vec<Check> {
    let opts = BracketOptions { window, ceiling: None };
    presentations()
        .into_iter()
        .map(|(name, ds)| {
            check("invariance", name, (|| {
                for d in &ds[1..] {
                    let r = invariance_spotcheck(&ds[0], d, opts)?;
                    if !r.equal {
                        return Ok((false, format!("{:?} differs", d.braid.word)));
                    }
                }
                Ok((true, format!("{} presentations", ds.len())))
            })())
        })
        .collect()
}

fn convolution(window: i32) -> Vec<Check> {
    vec![
        check("convolution", "build_qn(2) = Q2", build_qn(2, window).map(|c| (c == q2(), String::new()))),
        check("convolution", "build_qn(3) has the graded ranks of Q3", (|| {
            let s = simplify(&build_qn(3, window)?);
            let from = s.valid_from().unwrap_or(i32::MIN);
            Ok((s.graded_ranks_from(from) == q3().graded_ranks_from(from), format!("degrees from {}", from)))
        })()),
    ]
}
