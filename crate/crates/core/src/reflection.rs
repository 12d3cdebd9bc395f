//! The Kan-injective reflection chain.
//!
//! Starting from `X_0 = X`, even steps glue a free approximant `f⫽h` onto
//! the current stage for every span `X_i <-f- A -h-> A'` (a wide pushout of
//! pushouts, or of cocomma squares in weak mode). Odd steps then force every
//! approximant below every competing extension `g`, as one quotient. The chain
//! stops at the first even `k` where `x_{k,k+2}` is an isomorphism; `X_k`
//! together with `x_{0k}` is then the reflection of `X` into `LInj(H)`.

use std::collections::HashMap;
use std::sync::Arc;

use crate::constructions::{cocomma, pushout, wide_pushout_tagged};
use crate::error::{Error, Result};
use crate::kan::{ExtensionVerdict, InjectivityReport, LanTable, Side, Subject};
use crate::poset::{
    attainable_images, enumerate_monotone_maps, quotient_by_relations, FinPoset, MonotoneMap,
};

pub const DEFAULT_BUDGET: usize = 32;
pub const DEFAULT_STAGE_LIMIT: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Strong,
    /// Pushouts replaced by cocomma squares: approximants only satisfy
    /// `x_{j,j+1} ∘ f <= (f⫽h) ∘ h`.
    Weak,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ReflectionConfig {
    /// Stages `X_0 ..= X_budget` may be computed.
    pub budget: usize,
    pub mode: Mode,
    /// Largest stage allowed before the run is aborted.
    pub stage_limit: usize,
}

impl Default for ReflectionConfig {
    fn default() -> Self {
        Self {
            budget: DEFAULT_BUDGET,
            mode: Mode::Strong,
            stage_limit: DEFAULT_STAGE_LIMIT,
        }
    }
}

/// One span `X_j <-f- A -h-> A'` seen at even stage `j`, with its
/// approximant `f⫽h : A' -> X_{j+1}`.
#[derive(Clone, Debug)]
pub struct RegistryEntry {
    pub h_index: usize,
    pub f: MonotoneMap,
    pub stage: usize,
    pub approximant: MonotoneMap,
}

#[derive(Clone, Debug)]
pub struct ReflectionTrace {
    pub h: Vec<MonotoneMap>,
    pub config: ReflectionConfig,
    pub stages: Vec<Arc<FinPoset>>,
    /// `steps[i] = x_{i,i+1}`.
    pub steps: Vec<MonotoneMap>,
    pub registry: Vec<RegistryEntry>,
    pub converged_at: Option<usize>,
}

impl ReflectionTrace {
    pub fn new(x: Arc<FinPoset>, h: Vec<MonotoneMap>, config: ReflectionConfig) -> Result<Self> {
        if config.budget < 2 || !config.budget.is_multiple_of(2) {
            return Err(Error::InvalidBudget(config.budget));
        }
        Ok(Self {
            h,
            config,
            stages: vec![x],
            steps: Vec::new(),
            registry: Vec::new(),
            converged_at: None,
        })
    }

    /// Index of the newest stage.
    pub fn top(&self) -> usize {
        self.stages.len() - 1
    }

    pub fn stage(&self, i: usize) -> &Arc<FinPoset> {
        &self.stages[i]
    }

    pub fn stage_sizes(&self) -> Vec<usize> {
        self.stages.iter().map(|s| s.len()).collect()
    }

    /// `x_{ij}`. Panics unless `i <= j <= top`.
    pub fn connecting(&self, i: usize, j: usize) -> MonotoneMap {
        assert!(i <= j && j <= self.top(), "no connecting map {i} -> {j}");
        let mut map = MonotoneMap::identity(self.stages[i].clone());
        for step in &self.steps[i..j] {
            map = step.compose(&map);
        }
        map
    }

    /// `(X_k, x_{0k})` once converged.
    pub fn reflection(&self) -> Option<(Arc<FinPoset>, MonotoneMap)> {
        self.converged_at
            .map(|k| (self.stages[k].clone(), self.connecting(0, k)))
    }

    fn push_stage(&mut self, stage: Arc<FinPoset>, step: MonotoneMap) -> Result<()> {
        let index = self.stages.len();
        if stage.len() > self.config.stage_limit {
            return Err(Error::StageTooLarge {
                stage: index,
                size: stage.len(),
                limit: self.config.stage_limit,
            });
        }
        self.stages.push(stage);
        self.steps.push(step);
        Ok(())
    }

    fn ensure_room(&self) -> Result<()> {
        if self.top() + 1 > self.config.budget {
            return Err(Error::BudgetExceeded {
                budget: self.config.budget,
                sizes: self.stage_sizes(),
                trace: Box::new(self.clone()),
            });
        }
        Ok(())
    }

    /// Wide pushout of one square per span `(h, f)` with `f` into the
    /// current (even) stage.
    pub fn even_step(&mut self) -> Result<()> {
        let i = self.top();
        assert!(i.is_multiple_of(2), "even step from odd stage {i}");
        self.ensure_room()?;
        let xi = self.stages[i].clone();
        let mut spans = Vec::new();
        let mut squares = Vec::new();
        for (h_index, h) in self.h.iter().enumerate() {
            for f in enumerate_monotone_maps(h.dom(), &xi) {
                let square = match self.config.mode {
                    Mode::Strong => pushout(&f, h)?,
                    Mode::Weak => cocomma(&f, h)?,
                };
                squares.push(square);
                spans.push((h_index, f));
            }
        }
        let wide = wide_pushout_tagged(&xi, &squares, &format!("s{}x", i + 1))?;
        for ((h_index, f), (square, leg)) in
            spans.into_iter().zip(squares.iter().zip(&wide.cocone_legs))
        {
            self.registry.push(RegistryEntry {
                h_index,
                f,
                stage: i,
                approximant: leg.compose(&square.right_leg),
            });
        }
        self.push_stage(wide.apex, wide.base_leg)
    }

    /// One quotient forcing `x_{j+1,i+1} ∘ (f⫽h) <= g` for every registry
    /// entry and every `g` with `x_{j,i+1} ∘ f <= g ∘ h`.
    pub fn odd_step(&mut self) -> Result<()> {
        let m = self.top();
        assert!(m % 2 == 1, "odd step from even stage {m}");
        self.ensure_room()?;
        let forced = self.forcing_pairs();
        let q = quotient_by_relations(&self.stages[m], &forced);
        self.push_stage(q.quotient, q.projection)?;
        self.check_merge()
    }

    /// Sorted pairs `(c, v)` of the newest stage to be forced `c <= v`.
    pub(crate) fn forcing_pairs(&self) -> Vec<(usize, usize)> {
        let m = self.top();
        let xm = &self.stages[m];
        let to_top: Vec<MonotoneMap> = (0..=m).map(|j| self.connecting(j, m)).collect();
        let mut forced: Vec<(usize, usize)> = Vec::new();
        for e in &self.registry {
            let h = &self.h[e.h_index];
            let lower = &to_top[e.stage];
            let mut allowed = vec![xm.all(); h.cod().len()];
            for a in h.dom().elements() {
                allowed[h.apply(a)].intersect_with(xm.up(lower.apply(e.f.apply(a))));
            }
            let approx = &to_top[e.stage + 1];
            let seen = attainable_images(h.cod(), xm, &allowed);
            for (b, values) in seen.iter().enumerate() {
                let c = approx.apply(e.approximant.apply(b));
                forced.extend(values.ones().filter(|&v| v != c).map(|v| (c, v)));
            }
        }
        forced.sort_unstable();
        forced.dedup();
        forced
    }

    /// For entries `(h, f, j)` and `(h, x_{jj'} ∘ f, j')` with `j < j'`, the
    /// newest stage identifies `x_{j'+1,top} ∘ ((x_{jj'} f)⫽h)` with
    /// `x_{j+1,top} ∘ (f⫽h)`.
    pub fn check_merge(&self) -> Result<()> {
        let top = self.top();
        let to_top: Vec<MonotoneMap> = (0..=top).map(|j| self.connecting(j, top)).collect();
        let index: HashMap<(usize, usize, &[usize]), usize> = self
            .registry
            .iter()
            .enumerate()
            .map(|(n, e)| ((e.h_index, e.stage, e.f.images()), n))
            .collect();
        let evens: Vec<usize> = {
            let mut v: Vec<usize> = self.registry.iter().map(|e| e.stage).collect();
            v.sort_unstable();
            v.dedup();
            v
        };
        let mut between: HashMap<(usize, usize), MonotoneMap> = HashMap::new();
        for (n, &j) in evens.iter().enumerate() {
            for &later in &evens[n + 1..] {
                between.insert((j, later), self.connecting(j, later));
            }
        }
        for e in &self.registry {
            for &later in evens.iter().filter(|&&s| s > e.stage && s + 1 < top) {
                let shift = &between[&(e.stage, later)];
                let moved: Vec<usize> = e.f.images().iter().map(|&x| shift.apply(x)).collect();
                let Some(&other) = index.get(&(e.h_index, later, moved.as_slice())) else {
                    return Err(Error::InvariantViolated(format!(
                        "stage {later} lacks the transported span of stage {}",
                        e.stage
                    )));
                };
                let other = &self.registry[other];
                let mine = to_top[e.stage + 1].compose(&e.approximant);
                let theirs = to_top[later + 1].compose(&other.approximant);
                if mine != theirs {
                    return Err(Error::InvariantViolated(format!(
                        "approximants from stages {} and {later} are not merged in stage {top}",
                        e.stage
                    )));
                }
            }
        }
        Ok(())
    }

    /// Runs even and odd steps until `x_{k,k+2}` is invertible.
    pub fn run(&mut self) -> Result<()> {
        while self.converged_at.is_none() {
            let k = self.top();
            self.even_step()?;
            self.odd_step()?;
            if self.connecting(k, k + 2).is_iso() {
                self.converged_at = Some(k);
            }
        }
        Ok(())
    }

    fn converged(&self) -> Result<usize> {
        self.converged_at.ok_or(Error::NotConverged)
    }
}

pub fn run_reflection(
    x: Arc<FinPoset>,
    h: Vec<MonotoneMap>,
    budget: usize,
    mode: Mode,
) -> Result<ReflectionTrace> {
    run_reflection_with(
        x,
        h,
        ReflectionConfig {
            budget,
            mode,
            ..ReflectionConfig::default()
        },
    )
}

pub fn run_reflection_with(
    x: Arc<FinPoset>,
    h: Vec<MonotoneMap>,
    config: ReflectionConfig,
) -> Result<ReflectionTrace> {
    let mut trace = ReflectionTrace::new(x, h, config)?;
    trace.run()?;
    Ok(trace)
}

/// `Lan_h f` inside `X_k`, read off the chain as
/// `x_{k,k+2}^{-1} ∘ x_{k+1,k+2} ∘ (f⫽h)`.
pub fn extract_lan(
    trace: &ReflectionTrace,
    h_index: usize,
    f: &MonotoneMap,
) -> Result<MonotoneMap> {
    let k = trace.converged()?;
    let entry = trace
        .registry
        .iter()
        .find(|e| e.stage == k && e.h_index == h_index && e.f.images() == f.images())
        .ok_or(Error::MissingSpan)?;
    if **f.cod() != **trace.stage(k) || **f.dom() != **trace.h[h_index].dom() {
        return Err(Error::MissingSpan);
    }
    let back = trace.connecting(k, k + 2).inverse().ok_or_else(|| {
        Error::InvariantViolated(format!("x_{{{k},{}}} is not invertible", k + 2))
    })?;
    let lan = back.compose(&trace.connecting(k + 1, k + 2).compose(&entry.approximant));
    Ok(lan.retyped(trace.h[h_index].cod().clone(), trace.stage(k).clone()))
}

/// The unique `p_k : X_k -> P` with `p_k ∘ x_{0k} = p`, built stage by stage
/// from `p_{i+1} ∘ (f⫽h) = Lan_h (p_i ∘ f)`.
pub fn induce_morphism(
    trace: &ReflectionTrace,
    p: &MonotoneMap,
    target: &InjectivityReport,
) -> Result<MonotoneMap> {
    let k = trace.converged()?;
    let expected_side = match trace.config.mode {
        Mode::Strong => Side::Left,
        Mode::Weak => Side::WeakLeft,
    };
    let target_poset = p.cod();
    let matches_target = matches!(&target.subject, Subject::Object(obj) if **obj == **target_poset);
    if !matches_target || target.side != expected_side {
        return Err(Error::TargetNotInjective(
            "report does not describe the codomain of p".into(),
        ));
    }
    if !target.holds() {
        return Err(Error::TargetNotInjective(format!(
            "fails for h #{}",
            target
                .first_failure()
                .map(|e| e.h_index)
                .unwrap_or_default()
        )));
    }
    if **p.dom() != **trace.stage(0) {
        return Err(Error::DomainMismatch);
    }
    let tables: Vec<LanTable> = trace
        .h
        .iter()
        .map(|h| LanTable::new(target_poset, h))
        .collect();

    let mut current = p.retyped(trace.stage(0).clone(), target_poset.clone());
    for i in 0..k {
        let next = trace.stage(i + 1);
        let mut values: Vec<Option<usize>> = vec![None; next.len()];
        let mut assign = |slot: usize, value: usize| -> Result<()> {
            match values[slot] {
                Some(v) if v != value => Err(Error::InvariantViolated(format!(
                    "cocone is not well defined at `{}` of stage {}",
                    next.name(slot),
                    i + 1
                ))),
                _ => {
                    values[slot] = Some(value);
                    Ok(())
                }
            }
        };
        let step = &trace.steps[i];
        for x in trace.stage(i).elements() {
            assign(step.apply(x), current.apply(x))?;
        }
        if i % 2 == 0 {
            for e in trace.registry.iter().filter(|e| e.stage == i) {
                let pf: Vec<usize> = e.f.images().iter().map(|&x| current.apply(x)).collect();
                let lan = match tables[e.h_index].lookup(&pf) {
                    Some(ExtensionVerdict::Exists { extension, .. }) => extension,
                    _ => return Err(Error::TargetNotInjective("missing Kan extension".into())),
                };
                for b in e.approximant.dom().elements() {
                    assign(e.approximant.apply(b), lan.apply(b))?;
                }
            }
        }
        let images = values
            .into_iter()
            .enumerate()
            .map(|(slot, v)| {
                v.ok_or_else(|| {
                    Error::InvariantViolated(format!(
                        "`{}` of stage {} is not covered",
                        next.name(slot),
                        i + 1
                    ))
                })
            })
            .collect::<Result<Vec<usize>>>()?;
        current = MonotoneMap::new(next.clone(), target_poset.clone(), images).map_err(|e| {
            Error::InvariantViolated(format!("cocone component {} is not monotone: {e}", i + 1))
        })?;
    }
    Ok(current)
}
