//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

mod common;

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use ttc_lab::axioms::{
    all_strategyproofness_violations, check_mechanism, group_sp_combinations, is_strategyproof, Axiom,
    AxiomViolation, GROUP_SP_CAP,
};
use ttc_lab::domains::{self, LinearOrderSpec};
use ttc_lab::mechanisms::{
    build_diff_mechanism, build_diff_mechanism_oversize, canonicalize_failure, endowment_mechanism,
    lift_mechanism, Mechanism,
};
use ttc_lab::model::{Allocation, Domain, ObjectId, Profile, ProfileSpace, SubsetO};
use ttc_lab::richness::check_top_two;
use ttc_lab::ttc::ttc;
use ttc_lab::verifier::{
    classify, corollary_cases, verify_corollary, Classification, Efficiency, SearchBudget,
};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        let ok: bool = $cond;
        if !ok {
            return Err(format!($($fmt)+));
        }
    };
}

fn homo(d: &Domain) -> Vec<Domain> {
    vec![d.clone(); d.n()]
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn witness_passes(c: &Classification, doms: &[Domain], efficiency: Efficiency) -> Result<(), String> {
    let w = c.witness().ok_or("no witness")?;
    let mech = Mechanism::Table(w.clone());
    let eff = match efficiency {
        Efficiency::Pair => Axiom::Pair,
        Efficiency::Pareto => Axiom::Pareto,
    };
    let r = check_mechanism(&mech, doms, &[Axiom::Ir, eff, Axiom::Sp]).map_err(err)?;
    ensure!(r.clean, "witness fails an axiom: {:?}", r.results);
    ensure!(
        w.entries().iter().any(|(p, x)| ttc(p) != *x),
        "witness coincides with TTC"
    );
    Ok(())
}

fn corollary_three() -> Outcome {
    let start = Instant::now();
    let report = verify_corollary(3, None, SearchBudget::default()).map_err(err)?;
    ensure!(report.rows.len() == 63, "expected 63 domains, got {}", report.rows.len());
    ensure!(report.inconclusive == 0, "{} inconclusive domains", report.inconclusive);
    for row in &report.rows {
        ensure!(
            row.top_two == check_top_two(&row.domain).satisfied,
            "{}: top-two flag mismatch",
            row.label
        );
        ensure!(row.consistent, "{}: top-two {} pair {:?} pareto {:?}", row.label, row.top_two, row.pair, row.pareto);
    }
    let secs = start.elapsed().as_secs_f64();
    ensure!(secs < 60.0, "took {secs:.1}s");
    let unique = report.rows.iter().filter(|r| r.top_two).count();
    Ok(format!("63 domains, {unique} TTC domains, {secs:.2}s"))
}

fn catalog_four() -> Outcome {
    let mut summary = Vec::new();
    for case in corollary_cases(4).map_err(err)? {
        let expected = case.expected_unique.ok_or("catalog entry without expectation")?;
        let doms = homo(&case.domain);
        for eff in [Efficiency::Pair, Efficiency::Pareto] {
            let c = classify(&doms, eff, SearchBudget::default()).map_err(err)?;
            ensure!(!c.is_budget(), "{} ({eff}): budget exhausted", case.label);
            ensure!(
                c.is_unique_ttc() == expected,
                "{} ({eff}): expected unique={expected}, got {}",
                case.label,
                c.status_name()
            );
            if c.is_multiple() {
                witness_passes(&c, &doms, eff).map_err(|e| format!("{}: {e}", case.label))?;
            }
        }
        summary.push(case.label);
    }
    Ok(format!("{} domains classified as expected", summary.len()))
}

fn proposition_one() -> Outcome {
    for (name, d) in [
        ("d2", domains::example_d2()),
        ("single_peaked(3)", domains::single_peaked(3, &LinearOrderSpec::identity(3, false)).map_err(err)?),
    ] {
        let mech = build_diff_mechanism(&d).map_err(err)?;
        let doms = homo(&d);
        let r = check_mechanism(&mech, &doms, &[Axiom::Ir, Axiom::Pareto, Axiom::Sp]).map_err(err)?;
        ensure!(r.clean, "{name}: {:?}", r.results);
        let Mechanism::Diff(diff) = &mech else {
            return Err(format!("{name}: not a Diff mechanism"));
        };
        let mut on_diff = 0;
        for p in ProfileSpace::homogeneous(&d).iter() {
            let x = mech.evaluate(&p).map_err(err)?;
            if diff.contains(&p) {
                on_diff += 1;
                ensure!(x != ttc(&p), "{name}: agrees with TTC at Diff profile {p}");
            } else {
                ensure!(x == ttc(&p), "{name}: differs from TTC off Diff at {p}");
            }
        }
        ensure!(on_diff > 0, "{name}: Diff is empty");
    }
    Ok("d2 and single_peaked(3) pass IR, Pareto, SP and leave TTC on all of Diff".into())
}

fn diff_five_agents() -> Outcome {
    let d = Domain::parse_list(&["23451", "24351", "12345", "25341", "15342"]).map_err(err)?;
    ensure!(
        canonicalize_failure(&d).map_err(err)?.is_identity(),
        "domain is not in canonical form"
    );
    let mech = build_diff_mechanism_oversize(&d).map_err(err)?;
    let doms = homo(&d);
    ensure!(!is_strategyproof(&mech, &doms).map_err(err)?, "construction is strategyproof");
    let o = |i| ObjectId::new(i, 5).unwrap();
    let s345 = SubsetO::from_indices(&[3, 4, 5], 5).map_err(err)?;
    let Mechanism::Diff(diff) = &mech else {
        return Err("not a Diff mechanism".into());
    };
    let violations = all_strategyproofness_violations(&mech, &doms).map_err(err)?;
    let matching = violations.iter().filter(|v| {
        let AxiomViolation::Sp { profile, agent, misreport, truthful, deviated } = v else {
            return false;
        };
        let p = profile.prefs();
        let lied = profile.with_report(*agent, misreport.clone()).unwrap();
        agent.get() == 4
            && p[2].rank(&s345, 1).unwrap() == o(5)
            && p[4].rank(&s345, 1).unwrap() == o(3)
            && p[3].prefers(o(5), o(3))
            && p[3].prefers(o(3), o(4))
            && p[0].rank(&SubsetO::full(5), 2).unwrap() == o(4)
            && misreport.rank(&s345, 1).unwrap() == o(3)
            && !diff.contains(profile)
            && diff.contains(&lied)
            && truthful.of(*agent) == o(4)
            && deviated.of(*agent) == o(3)
    });
    let k = matching.count();
    ensure!(k > 0, "no violation of the expected shape among {}", violations.len());
    Ok(format!("{k} of {} manipulations are agent 4 entering Diff for o3 over o4", violations.len()))
}

fn lifting() -> Outcome {
    let d3 = domains::example_d3();
    let s = SubsetO::from_indices(&[1, 3, 4], 4).map_err(err)?;
    let inner = build_diff_mechanism(&d3.restricted(&s).map_err(err)?).map_err(err)?;
    let mech = lift_mechanism(&d3, &s, inner).map_err(err)?;
    let doms = homo(&d3);
    let r = check_mechanism(&mech, &doms, &[Axiom::Ir, Axiom::Pair, Axiom::Pareto, Axiom::Sp]).map_err(err)?;
    ensure!(r.profiles == 256, "{} profiles", r.profiles);
    ensure!(r.clean, "{:?}", r.results);
    let differing = ProfileSpace::homogeneous(&d3)
        .iter()
        .filter(|p| mech.evaluate(p).unwrap() != ttc(p))
        .count();
    ensure!(differing > 0, "lifted mechanism equals TTC");
    Ok(format!("256 profiles, differs from TTC at {differing}"))
}

fn fact_one() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0xfac7_0001);
    let mut instances = Vec::new();
    while instances.len() < 500 {
        let n = rng.gen_range(2..=4);
        let max = match n {
            2 => 2,
            3 => 6,
            _ => 6,
        };
        let size = rng.gen_range(1..=max);
        let d = common::random_domain(n, size, &mut rng);
        if group_sp_combinations(&homo(&d)) <= GROUP_SP_CAP {
            instances.push(d);
        }
    }
    let profiles: usize = instances
        .par_iter()
        .map(|d| -> Result<usize, String> {
            let doms = homo(d);
            let r = check_mechanism(&Mechanism::Ttc, &doms, &Axiom::ALL).map_err(err)?;
            ensure!(r.clean, "TTC fails on {:?}: {:?}", d, r.results);
            Ok(r.profiles)
        })
        .collect::<Result<Vec<_>, _>>()?
        .into_iter()
        .sum();
    let secs = start.elapsed().as_secs_f64();
    ensure!(secs < 300.0, "took {secs:.1}s");
    Ok(format!("500 domains, {profiles} profiles, {secs:.1}s"))
}

fn oracles() -> Outcome {
    // (a) TTC is the unique strict-core allocation
    let mut checked = 0usize;
    for n in 1..=4 {
        let d = domains::unrestricted(n).map_err(err)?;
        let space = ProfileSpace::homogeneous(&d);
        let bad = (0..space.len()).into_par_iter().find_map_any(|i| {
            let p = space.profile(i);
            let core = common::strict_core(&p);
            (core != vec![ttc(&p)]).then(|| format!("{p}: core {core:?}"))
        });
        ensure!(bad.is_none(), "core oracle: {}", bad.unwrap());
        checked += space.len();
    }

    // (b) cycle-based Pareto check against all n! allocations
    let mut rng = ChaCha8Rng::seed_from_u64(0x9a_7e70);
    let mut efficient = 0;
    for _ in 0..10_000 {
        let n = rng.gen_range(1..=5);
        let p = common::random_profile(n, &mut rng);
        let x = if rng.gen_bool(0.3) { ttc(&p) } else { common::random_allocation(n, &mut rng) };
        let fast = ttc_lab::axioms::is_pareto(&p, &x).map_err(err)?;
        ensure!(fast == common::pareto_brute(&p, &x), "pareto mismatch at {p} / {x}");
        efficient += fast as usize;
    }

    // (c) classify against direct enumeration of strategyproof tables
    let mut instances: Vec<Vec<Domain>> = Vec::new();
    let all2 = domains::unrestricted(2).map_err(err)?;
    let subsets2: Vec<Domain> = [vec![0], vec![1], vec![0, 1]]
        .iter()
        .map(|ks| Domain::new(ks.iter().map(|&k| all2.prefs()[k].clone()).collect()).unwrap())
        .collect();
    for a in &subsets2 {
        for b in &subsets2 {
            instances.push(vec![a.clone(), b.clone()]);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0xc1a5_51f7);
    while instances.len() < 1_500 {
        let sizes: Vec<usize> = (0..3).map(|_| rng.gen_range(1..=6)).collect();
        if sizes.iter().product::<usize>() > 6 {
            continue;
        }
        instances.push(sizes.iter().map(|&s| common::random_domain(3, s, &mut rng)).collect());
    }
    let results = instances
        .par_iter()
        .map(|doms| -> Result<(bool, bool), String> {
            let space = ProfileSpace::new(doms.clone()).map_err(err)?;
            let mut both = (false, false);
            for eff in [Efficiency::Pair, Efficiency::Pareto] {
                let lists: Vec<Vec<Allocation>> = space
                    .iter()
                    .map(|p| {
                        common::all_allocations(p.n())
                            .into_iter()
                            .filter(|x| {
                                common::ir_brute(&p, x)
                                    && match eff {
                                        Efficiency::Pair => common::pair_brute(&p, x),
                                        Efficiency::Pareto => common::pareto_brute(&p, x),
                                    }
                            })
                            .collect()
                    })
                    .collect();
                let count = common::count_sp_tables(&space, &lists, 1 << 20).ok_or("instance too large")?;
                let c = classify(doms, eff, SearchBudget::default()).map_err(err)?;
                ensure!(count >= 1, "no strategyproof table at all for {doms:?}");
                ensure!(
                    c.is_unique_ttc() == (count == 1) && c.is_multiple() == (count > 1),
                    "{doms:?} ({eff}): {count} tables, classify says {}",
                    c.status_name()
                );
                if eff == Efficiency::Pair {
                    both.0 = count > 1;
                } else {
                    both.1 = count > 1;
                }
            }
            Ok(both)
        })
        .collect::<Result<Vec<_>, _>>()?;
    let multiple = results.iter().filter(|r| r.0).count();
    Ok(format!(
        "core oracle on {checked} profiles; pareto on 10000 instances ({efficient} efficient); {} enumeration instances ({multiple} multiple under pair)",
        instances.len()
    ))
}

fn heterogeneous_singletons() -> Outcome {
    let doms = vec![
        Domain::parse_list(&["213"]).map_err(err)?,
        Domain::parse_list(&["321"]).map_err(err)?,
        Domain::parse_list(&["132"]).map_err(err)?,
    ];
    let c = classify(&doms, Efficiency::Pair, SearchBudget::default()).map_err(err)?;
    ensure!(c.is_multiple(), "got {}", c.status_name());
    let w = c.witness().unwrap();
    let p = Profile::parse_list(&["213", "321", "132"]).map_err(err)?;
    ensure!(w.evaluate(&p).map_err(err)? == Allocation::endowment(3), "witness is not the endowment allocation");
    let r = check_mechanism(&endowment_mechanism(), &doms, &[Axiom::Ir, Axiom::Pair, Axiom::Sp]).map_err(err)?;
    ensure!(r.clean, "{:?}", r.results);
    ensure!(ttc(&p).to_string() == "231", "TTC at the single profile is {}", ttc(&p));
    Ok("endowment mechanism is a valid second mechanism".into())
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("1 equivalence at n=3", corollary_three),
        ("2 catalog at n=4", catalog_four),
        ("3 Diff mechanism", proposition_one),
        ("4 Diff above four agents", diff_five_agents),
        ("5 lifting on d3", lifting),
        ("6 TTC axioms on random domains", fact_one),
        ("7 oracle equivalences", oracles),
        ("8 heterogeneous singleton domains", heterogeneous_singletons),
    ];
    let mut failed = 0;
    for (name, f) in criteria {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(f).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS [{name}] {detail} ({secs:.1}s)"),
            Err(why) => {
                failed += 1;
                println!("FAIL [{name}] {why} ({secs:.1}s)");
            }
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
