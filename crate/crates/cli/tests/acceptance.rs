//! Acceptance suite: one line per criterion.
//!
//! Runs without the libtest harness so that every line is printed even when
//! all criteria pass. A criterion listed in `KNOWN_FAILURES` must fail in
//! exactly the pinned way; anything else that fails makes the run fail.

use std::process::{Command, ExitCode};
use std::sync::Arc;
use std::time::Instant;

use kanpos::constructions::inserter;
use kanpos::kan::{
    is_left_kan_injective_morphism, is_left_kan_injective_object, least_extension, membership,
    pointwise_join_extension, LanTable, Side, Subject,
};
use kanpos::monads::{
    algebra_laws_check, algebra_structure, coprojection_closure_check, coprojections_between,
    kz_check, lowerset, monad_laws_check, units_injectivity_crosscheck, CoprojectionSquare,
    CoprojectionWitness,
};
use kanpos::oracles::{
    count_factorizations, find_isomorphism_under, free_join_semilattice, posets_up_to,
    verify_reflection, weak_equals_strong_probe,
};
use kanpos::poset::{classify_morphism, enumerate_monotone_maps};
use kanpos::reflection::{
    induce_morphism, run_reflection_with, Mode, ReflectionConfig, ReflectionTrace,
};
use kanpos::{samples, Error, FinPoset, MonotoneMap};

const KNOWN_FAILURES: &[(u32, &str)] = &[(
    3,
    "the 3-antichain chain never reaches an isomorphic pair of stages; see notes/decisions.md",
)];

enum Status {
    Pass,
    Fail,
    /// Failed in the way recorded in `KNOWN_FAILURES`.
    KnownFail,
}

struct Outcome {
    status: Status,
    detail: String,
}

impl Outcome {
    fn check(ok: bool, detail: String) -> Self {
        Outcome {
            status: if ok { Status::Pass } else { Status::Fail },
            detail,
        }
    }
}

fn h_vee() -> MonotoneMap {
    samples::antichain_into_vee()
}

fn subset(p: &FinPoset, mask: u32) -> kanpos::FixedBitSet {
    let mut s = kanpos::FixedBitSet::with_capacity(p.len());
    s.extend(p.elements().filter(|&i| mask >> i & 1 == 1));
    s
}

/// Least upper bound of `mask`, by brute force over the order relation.
fn lub(p: &FinPoset, mask: u32) -> Option<usize> {
    let ubs: Vec<usize> = p
        .elements()
        .filter(|&u| p.elements().all(|x| mask >> x & 1 == 0 || p.leq(x, u)))
        .collect();
    ubs.iter()
        .copied()
        .find(|&u| ubs.iter().all(|&v| p.leq(u, v)))
}

fn complete_lattice_oracle(p: &FinPoset) -> bool {
    !p.is_empty() && (0..1u32 << p.len()).all(|m| lub(p, m).is_some())
}

fn binary_joins_oracle(p: &FinPoset) -> bool {
    p.elements()
        .all(|x| p.elements().all(|y| lub(p, 1 << x | 1 << y).is_some()))
}

fn discrete_oracle(p: &FinPoset) -> bool {
    p.elements()
        .all(|x| p.elements().all(|y| x == y || !p.leq(x, y)))
}

fn all_maps(a: &Arc<FinPoset>, b: &Arc<FinPoset>) -> Vec<MonotoneMap> {
    enumerate_monotone_maps(a, b).collect()
}

fn criterion_1() -> Outcome {
    // Up to relabelling the domain, every embedding is a subposet inclusion.
    let lattices: Vec<Arc<FinPoset>> = posets_up_to(5)
        .into_iter()
        .filter(|l| complete_lattice_oracle(l))
        .collect();
    let mut cases = 0usize;
    for b in posets_up_to(4) {
        for mask in 0..1u32 << b.len() {
            let (a, indices) = b.induced(&subset(&b, mask));
            let a = Arc::new(a);
            let h = MonotoneMap::new(a.clone(), b.clone(), indices).unwrap();
            for l in &lattices {
                for f in enumerate_monotone_maps(&a, l) {
                    let formula = pointwise_join_extension(&h, &f).unwrap();
                    let searched = least_extension(&h, &f).unwrap();
                    let agree = formula.is_some()
                        && formula.as_ref() == searched.extension()
                        && searched.is_strict();
                    if !agree {
                        return Outcome::check(
                            false,
                            format!(
                                "disagreement for h = {:?}, f = {:?}",
                                h.images(),
                                f.images()
                            ),
                        );
                    }
                    cases += 1;
                }
            }
        }
    }
    Outcome::check(
        true,
        format!(
            "{cases} (h, f) pairs into {} complete lattices",
            lattices.len()
        ),
    )
}

/// `g ∘ f` as an assignment.
fn after(g: &[usize], f: &[usize]) -> Vec<usize> {
    f.iter().map(|&x| g[x]).collect()
}

fn leq_maps(p: &FinPoset, f: &[usize], g: &[usize]) -> bool {
    f.iter().zip(g).all(|(&x, &y)| p.leq(x, y))
}

fn criterion_2() -> Outcome {
    let probes = posets_up_to(2);
    let posets = posets_up_to(4);
    let mut maps_checked = 0;
    for a in &posets {
        let into_a: Vec<Vec<Vec<usize>>> = probes
            .iter()
            .map(|z| {
                enumerate_monotone_maps(z, a)
                    .map(|m| m.images().to_vec())
                    .collect()
            })
            .collect();
        for b in &posets {
            let out_of_b: Vec<Vec<Vec<usize>>> = probes
                .iter()
                .map(|z| {
                    enumerate_monotone_maps(b, z)
                        .map(|m| m.images().to_vec())
                        .collect()
                })
                .collect();
            for f in enumerate_monotone_maps(a, b) {
                let fi = f.images();
                let order_mono = into_a.iter().all(|gs| {
                    gs.iter().all(|g| {
                        gs.iter().all(|g2| {
                            !leq_maps(b, &after(fi, g), &after(fi, g2)) || leq_maps(a, g, g2)
                        })
                    })
                });
                let (mut epi, mut order_epi) = (true, true);
                for (z, gs) in probes.iter().zip(&out_of_b) {
                    for g in gs {
                        for g2 in gs {
                            let (gf, g2f) = (after(g, fi), after(g2, fi));
                            if gf == g2f && g != g2 {
                                epi = false;
                            }
                            if leq_maps(z, &gf, &g2f) && !leq_maps(z, g, g2) {
                                order_epi = false;
                            }
                        }
                    }
                }
                let embedding = f.is_embedding();
                let surjective = f.is_surjective();
                let flags = classify_morphism(&f);
                let ok = order_mono == embedding
                    && order_epi == epi
                    && epi == surjective
                    && flags.order_mono == order_mono
                    && flags.order_epi == order_epi
                    && flags.epi == epi;
                if !ok {
                    return Outcome::check(false, format!("characterization fails for {:?}", fi));
                }
                maps_checked += 1;
            }
        }
    }
    Outcome::check(
        true,
        format!("{maps_checked} maps, probes from every poset of size <= 2"),
    )
}

/// Reflection runs for every poset of size at most 3, in order.
struct Reflections {
    runs: Vec<(Arc<FinPoset>, Result<ReflectionTrace, Error>)>,
}

fn reflections() -> Reflections {
    let runs = posets_up_to(3)
        .into_iter()
        .map(|p| {
            let trace = run_reflection_with(p.clone(), vec![h_vee()], ReflectionConfig::default());
            (p, trace)
        })
        .collect();
    Reflections { runs }
}

impl Reflections {
    fn converged(&self) -> impl Iterator<Item = (&Arc<FinPoset>, &ReflectionTrace)> {
        self.runs
            .iter()
            .filter_map(|(p, t)| t.as_ref().ok().map(|t| (p, t)))
    }
}

fn is_antichain3(p: &FinPoset) -> bool {
    p.len() == 3 && discrete_oracle(p)
}

/// The 3-antichain with enough room to see the chain settle into its cycle.
fn pinned_antichain3() -> Result<(), String> {
    let config = ReflectionConfig {
        budget: 32,
        mode: Mode::Strong,
        stage_limit: 256,
    };
    match run_reflection_with(Arc::new(samples::antichain(3)), vec![h_vee()], config) {
        Err(Error::BudgetExceeded { sizes, .. }) => {
            let head = [3, 12, 6, 42, 12, 156];
            let periodic = sizes.len() == 33
                && sizes[..6] == head
                && sizes[6..]
                    .chunks(2)
                    .all(|c| c[0] == 13 && c.get(1).is_none_or(|&s| s == 182));
            if periodic {
                Ok(())
            } else {
                Err(format!("unexpected stage sizes {sizes:?}"))
            }
        }
        Ok(t) => Err(format!("converged at {:?}", t.converged_at)),
        Err(e) => Err(e.to_string()),
    }
}

fn criterion_3(r: &Reflections) -> Outcome {
    let mut matched = 0;
    let mut problems = Vec::new();
    let mut antichain3_pinned = false;
    for (p, run) in &r.runs {
        match run {
            Ok(trace) => {
                let (object, unit) = trace.reflection().unwrap();
                let (oracle, oracle_unit) = free_join_semilattice(p);
                let iso = find_isomorphism_under(&unit, &oracle_unit);
                if iso.is_some() && object.len() == oracle.len() {
                    matched += 1;
                } else {
                    problems.push(format!(
                        "{:?} does not match the free join-semilattice",
                        p.names()
                    ));
                }
                if p.len() == 2 && discrete_oracle(p) && object.len() != 3 {
                    problems.push("2-antichain reflection is not 3 elements".into());
                }
            }
            Err(Error::StageTooLarge { .. }) if is_antichain3(p) => match pinned_antichain3() {
                Ok(()) => antichain3_pinned = true,
                Err(e) => problems.push(format!("3-antichain: {e}")),
            },
            Err(e) => problems.push(format!("{:?}: {e}", p.names())),
        }
    }
    let total = r.runs.len();
    if !problems.is_empty() {
        return Outcome::check(false, problems.join("; "));
    }
    if antichain3_pinned {
        return Outcome {
            status: Status::KnownFail,
            detail: format!(
                "{matched}/{total} posets match the free join-semilattice under the unit; \
                 3-antichain: no convergence in 32 stages, sizes settle into 13/182"
            ),
        };
    }
    Outcome::check(matched == total, format!("{matched}/{total} posets match"))
}

fn criterion_4(r: &Reflections) -> Outcome {
    let h = h_vee();
    let targets: Vec<Arc<FinPoset>> = posets_up_to(4)
        .into_iter()
        .filter(|t| {
            membership(
                &Subject::Object(t.clone()),
                std::slice::from_ref(&h),
                Side::Left,
            )
            .holds()
        })
        .collect();
    let mut checked = 0;
    for (x, trace) in r.converged() {
        let (object, unit) = trace.reflection().unwrap();
        let own = [LanTable::new(&object, &h)];
        for t in &targets {
            let report = membership(
                &Subject::Object(t.clone()),
                std::slice::from_ref(&h),
                Side::Left,
            );
            let theirs = [LanTable::new(t, &h)];
            for p in enumerate_monotone_maps(x, t) {
                let q = match induce_morphism(trace, &p, &report) {
                    Ok(q) => q,
                    Err(e) => return Outcome::check(false, format!("induce_morphism failed: {e}")),
                };
                let ok = q.compose(&unit) == p
                    && is_left_kan_injective_morphism(&q, &h).holds()
                    && count_factorizations(&unit, &p, &own, &theirs, 2) == 1;
                if !ok {
                    return Outcome::check(
                        false,
                        format!("p = {:?} into {:?}", p.images(), t.names()),
                    );
                }
                checked += 1;
            }
        }
    }
    Outcome::check(
        true,
        format!(
            "{checked} maps p into {} Kan-injective targets of size <= 4",
            targets.len()
        ),
    )
}

fn criterion_5() -> Outcome {
    let posets = posets_up_to(4);
    let mut lattices = 0;
    for x in &posets {
        if !kz_check(x) || !monad_laws_check(x).holds() {
            return Outcome::check(false, format!("laws fail at {:?}", x.names()));
        }
        let t = lowerset(x);
        let alpha = algebra_structure(&t);
        let lattice = complete_lattice_oracle(x);
        if alpha.is_ok() != lattice {
            return Outcome::check(
                false,
                format!("algebra/lattice mismatch at {:?}", x.names()),
            );
        }
        if let Ok(alpha) = alpha {
            if !algebra_laws_check(&t, &alpha).holds() {
                return Outcome::check(false, format!("algebra laws fail at {:?}", x.names()));
            }
            lattices += 1;
        }
    }
    Outcome::check(
        true,
        format!(
            "{} posets, {lattices} complete lattices carry the algebra",
            posets.len()
        ),
    )
}

fn criterion_6() -> Outcome {
    let family = posets_up_to(3);
    let report = units_injectivity_crosscheck(&family);
    let algebras = report.rows.iter().filter(|r| r.algebra).count();
    Outcome::check(
        report.forward_holds() && report.converse_within_family(),
        format!(
            "{} posets: {algebras} algebras injective for all units, {} non-algebras each defeated",
            family.len(),
            family.len() - algebras
        ),
    )
}

fn criterion_7() -> Outcome {
    let h = h_vee();
    let members: Vec<Arc<FinPoset>> = posets_up_to(3)
        .into_iter()
        .filter(|x| is_left_kan_injective_object(x, &h).holds())
        .collect();
    let mut pairs = 0;
    for x in &members {
        for y in &members {
            let maps = all_maps(x, y);
            for u in maps
                .iter()
                .filter(|u| is_left_kan_injective_morphism(u, &h).holds())
            {
                for v in &maps {
                    let ins = inserter(u, v).unwrap();
                    if !is_left_kan_injective_morphism(&ins.arrow, &h).holds() {
                        return Outcome::check(
                            false,
                            format!("u = {:?}, v = {:?}", u.images(), v.images()),
                        );
                    }
                    pairs += 1;
                }
            }
        }
    }
    Outcome::check(
        true,
        format!("{pairs} pairs (u, v) over {} members", members.len()),
    )
}

fn criterion_8() -> Outcome {
    let small = posets_up_to(3);
    let targets = posets_up_to(4);
    let mut hs = 0;
    for a in &small {
        for b in &small {
            for h in enumerate_monotone_maps(a, b).filter(|h| !h.is_embedding()) {
                for p in &targets {
                    if is_left_kan_injective_object(p, &h).holds() && !discrete_oracle(p) {
                        return Outcome::check(
                            false,
                            format!("{:?} passes for h = {:?}", p.names(), h.images()),
                        );
                    }
                }
                hs += 1;
            }
        }
    }
    Outcome::check(
        true,
        format!("{hs} non-embeddings, {} posets each", targets.len()),
    )
}

fn criterion_9() -> Outcome {
    let universe = posets_up_to(3);
    let report = match weak_equals_strong_probe(&[samples::antichain_to_point()], &universe, 32) {
        Ok(r) => r,
        Err(e) => return Outcome::check(false, e.to_string()),
    };
    let exact = report
        .rows
        .iter()
        .all(|row| row.weak_member == binary_joins_oracle(&universe[row.index]));
    let skipped: Vec<String> = report
        .unconverged
        .iter()
        .map(|&i| format!("{:?}", universe[i].names()))
        .collect();
    Outcome::check(
        exact && report.inclusion_holds(),
        format!(
            "weak members = join-semilattices: {exact}; inclusion over {} units: {}; converse (family-relative): {}; \
             no unit for {}",
            report.units.len(),
            report.inclusion_holds(),
            report.converse_within_universe(),
            if skipped.is_empty() { "none".to_string() } else { skipped.join(", ") }
        ),
    )
}

fn criterion_10() -> Outcome {
    let h = h_vee();
    let posets = posets_up_to(4);
    let mut witnesses: Vec<CoprojectionWitness> = Vec::new();
    for c in &posets {
        for x in &posets {
            witnesses.extend(coprojections_between(c, x));
        }
    }
    let coprojections: Vec<MonotoneMap> = witnesses.iter().map(|w| w.r.clone()).collect();
    // Squares only matter when f can be Kan-injective, so both tops are members.
    let member = |p: &Arc<FinPoset>| is_left_kan_injective_object(p, &h).holds();
    let sources: Vec<&CoprojectionWitness> =
        witnesses.iter().filter(|w| member(w.r.dom())).collect();
    let mut squares = Vec::new();
    for w1 in &sources {
        for w2 in &sources {
            for f in enumerate_monotone_maps(w1.r.dom(), w2.r.dom()) {
                let g = w2.r.compose(&f).compose(&w1.s);
                if g.compose(&w1.r) == w2.r.compose(&f) {
                    squares.push(CoprojectionSquare {
                        f,
                        g,
                        r1: w1.r.clone(),
                        r2: w2.r.clone(),
                    });
                }
            }
        }
    }
    match coprojection_closure_check(&[h], &coprojections, &squares) {
        Ok(()) => Outcome::check(
            true,
            format!(
                "{} coprojections, {} commuting squares",
                coprojections.len(),
                squares.len()
            ),
        ),
        Err(c) => Outcome::check(false, format!("{c:?}")),
    }
}

fn mutations(c: &FinPoset) -> Vec<FinPoset> {
    let names: Vec<String> = c.names().to_vec();
    let covers = c.cover_pairs();
    let mut out = Vec::new();
    for e in c.elements() {
        let mut keep = c.all();
        keep.set(e, false);
        out.push(c.induced(&keep).0);
    }
    for i in 0..covers.len() {
        let rest: Vec<(usize, usize)> = covers
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, &p)| p)
            .collect();
        out.push(FinPoset::new(names.clone(), &rest).unwrap());
    }
    for x in c.elements() {
        for y in c.elements() {
            if x != y && !c.leq(x, y) && !c.leq(y, x) {
                let mut more = covers.clone();
                more.push((x, y));
                out.push(FinPoset::new(names.clone(), &more).unwrap());
            }
        }
    }
    let mut wider = names.clone();
    wider.push("extra".into());
    out.push(FinPoset::new(wider, &covers).unwrap());
    out
}

fn criterion_11(r: &Reflections) -> Outcome {
    let h = h_vee();
    let hs = std::slice::from_ref(&h);
    let mut rejected = 0;
    for (x, _) in r.converged() {
        let (c, unit) = free_join_semilattice(x);
        let targets = vec![c.clone(), Arc::new(samples::diamond())];
        if let Err(e) = verify_reflection(&unit, hs, &targets) {
            return Outcome::check(
                false,
                format!("candidate for {:?} rejected: {e:?}", x.names()),
            );
        }
        for m in mutations(&c) {
            let m = Arc::new(m);
            for u in enumerate_monotone_maps(x, &m) {
                if verify_reflection(&u, hs, &targets).is_ok() {
                    return Outcome::check(false, format!("mutant {:?} accepted", m.names()));
                }
                rejected += 1;
            }
        }
    }
    let out = Command::new(env!("CARGO_BIN_EXE_kanpos"))
        .args(["reflect", "antichain2", "-H", "emb_2_V", "--budget", "2"])
        .output()
        .unwrap();
    let stderr = String::from_utf8_lossy(&out.stderr);
    let budget_ok =
        out.status.code() == Some(2) && stderr.contains("did not converge within 2 stages");
    Outcome::check(
        budget_ok,
        format!(
            "{rejected} mutant units rejected; `reflect antichain2 --budget 2` exits {:?}",
            out.status.code()
        ),
    )
}

type Criterion<'a> = (u32, &'static str, Box<dyn Fn() -> Outcome + 'a>);

fn main() -> ExitCode {
    // `cargo test` passes libtest flags; only a name filter is honoured.
    let filter: Option<String> = std::env::args().skip(1).find(|a| !a.starts_with('-'));
    if filter
        .as_deref()
        .is_some_and(|f| !"acceptance".contains(f) && !f.starts_with("criterion"))
    {
        return ExitCode::SUCCESS;
    }

    let reflections = reflections();
    let criteria: Vec<Criterion> = vec![
        (
            1,
            "Lan equals the pointwise join formula",
            Box::new(criterion_1),
        ),
        (
            2,
            "order-monos are embeddings, order-epis are surjections",
            Box::new(criterion_2),
        ),
        (
            3,
            "semilattice reflection matches the free join-semilattice",
            Box::new(|| criterion_3(&reflections)),
        ),
        (
            4,
            "induced morphisms exist, are Kan-injective and unique",
            Box::new(|| criterion_4(&reflections)),
        ),
        (
            5,
            "lowerset monad: laws, KZ, algebras are complete lattices",
            Box::new(criterion_5),
        ),
        (
            6,
            "algebras versus units of the family",
            Box::new(criterion_6),
        ),
        (7, "inserter-ideal", Box::new(criterion_7)),
        (
            8,
            "non-embeddings only admit discrete injectives",
            Box::new(criterion_8),
        ),
        (
            9,
            "weak versus strong Kan-injectivity",
            Box::new(criterion_9),
        ),
        (10, "closure under coprojections", Box::new(criterion_10)),
        (
            11,
            "negative controls",
            Box::new(|| criterion_11(&reflections)),
        ),
    ];

    let mut broken = 0;
    for (id, title, run) in &criteria {
        let wanted = filter
            .as_deref()
            .is_none_or(|f| f == "acceptance" || f == format!("criterion{id}"));
        if !wanted {
            continue;
        }
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        let known = KNOWN_FAILURES.iter().find(|(k, _)| k == id);
        let label = match (&outcome.status, known) {
            (Status::Pass, None) => "PASS",
            (Status::KnownFail, Some(_)) => "FAIL (known)",
            (Status::Pass, Some(_)) => {
                broken += 1;
                "PASS (listed as a known failure)"
            }
            _ => {
                broken += 1;
                "FAIL"
            }
        };
        println!(
            "criterion {id:>2} {label}: {title} [{secs:.1}s] {}",
            outcome.detail
        );
        if let (Status::KnownFail, Some((_, why))) = (&outcome.status, known) {
            println!("             {why}");
        }
    }
    if broken == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{broken} criterion line(s) did not match expectations");
        ExitCode::FAILURE
    }
}
