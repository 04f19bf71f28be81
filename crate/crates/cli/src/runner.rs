//! Builds scenarios from configs and evaluates pipelines and checks.

use std::time::Instant;

use prepsim_core::algebra::linalg::hermitian_deviation;
use prepsim_core::algebra::random::{random_ket, random_unitary};
use prepsim_core::algebra::{
    evolve, lueders_collapse, partial_trace, probability, trace_distance, DensityOperator, Ket, SpaceShape, Unitary,
    Vector,
};
use prepsim_core::engine::{
    coincidence_probability, evolve_conditional, factorization_deviation, twin_events_check, verify_raio,
    FactorizedEvolution, PipelineComparison, PipelineKind,
};
use prepsim_core::models::{
    build_hole_scenario_ideal, build_hole_scenario_realistic, build_sg_scenario, chain_two_holes,
    generate_random_scenario, SegmentedScreen, SgParams,
};
use prepsim_core::{Error, ScenarioBundle64, Tolerances, C};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::config::{Amplitudes, CheckName, HoleIdealConfig, ModelConfig, PipelineName, ScenarioConfig};
use crate::report::{
    matrix_to_rows, Agreement, Bound, CheckReport, InstanceReport, Measurement, PairwiseDistance, PipelineReport,
    Probabilities, RunReport,
};

/// Salt mixed into the instance seed for the factorization negative control.
const CONTROL_SALT: u64 = 0x9e37_79b9_7f4a_7c15;

#[derive(Debug, thiserror::Error)]
#[error("scenario `{scenario}`: {source}")]
pub struct ConstructionError {
    pub scenario: String,
    #[source]
    pub source: Error,
}

/// One built scenario ready for evaluation.
pub struct Instance {
    pub label: String,
    pub seed: Option<u64>,
    pub bundle: ScenarioBundle64,
}

pub fn run_scenario(config: &ScenarioConfig) -> Result<RunReport, ConstructionError> {
    let start = Instant::now();
    let tol = config.tolerances();
    let instances = build_instances(config).map_err(|source| ConstructionError {
        scenario: config.name.clone(),
        source,
    })?;
    let reports: Vec<InstanceReport> = instances
        .par_iter()
        .map(|inst| evaluate(inst, &config.pipelines, &config.checks, &tol))
        .collect();
    Ok(RunReport::new(
        config.name.clone(),
        config.model.name().to_owned(),
        config.model.seed(),
        &tol,
        config.pipelines.iter().map(|p| p.as_str().to_owned()).collect(),
        config.checks.iter().map(|c| c.as_str().to_owned()).collect(),
        reports,
        start.elapsed().as_secs_f64(),
    ))
}

fn ket_from(shape: SpaceShape, amplitudes: &Amplitudes) -> prepsim_core::Result<Ket<f64>> {
    let v = Vector::<f64>::from_iterator(amplitudes.len(), amplitudes.iter().map(|&[re, im]| C::new(re, im)));
    Ket::normalized(shape, v)
}

fn build_hole_ideal(h: &HoleIdealConfig) -> prepsim_core::Result<(SegmentedScreen, ScenarioBundle64)> {
    let screen = h.screen.build()?;
    let psi = match &h.psi {
        Some(a) => ket_from(screen.screen_shape(), a)?,
        None => screen.uniform_screen_ket(),
    };
    let chi = match &h.chi {
        Some(a) => ket_from(screen.particle_shape(), a)?,
        None => screen.uniform_particle_ket(),
    };
    let bundle = build_hole_scenario_ideal(&screen, &psi, &chi)?;
    Ok((screen, bundle))
}

pub fn build_instances(config: &ScenarioConfig) -> prepsim_core::Result<Vec<Instance>> {
    let single = |bundle, seed| {
        Ok(vec![Instance {
            label: config.name.clone(),
            seed,
            bundle,
        }])
    };
    match &config.model {
        ModelConfig::SternGerlach(sg) => {
            let mut params = SgParams::new(
                C::new(sg.alpha[0], sg.alpha[1]),
                C::new(sg.beta[0], sg.beta[1]),
                sg.grid_n,
            );
            params.a_plus = sg.a_plus;
            params.a_minus = sg.a_minus;
            params.modification = sg.modification.into();
            params.drift = sg.drift;
            single(build_sg_scenario(&params)?, None)
        }
        ModelConfig::HoleIdeal(h) => single(build_hole_ideal(h)?.1, None),
        ModelConfig::HoleRealistic(h) => {
            let screen = h.screen.build()?;
            let (phi, seed) = match &h.phi {
                Some(a) => (ket_from(screen.composite_shape(), a)?, None),
                None => {
                    let seed = h.phi_seed.unwrap_or(0);
                    let mut rng = ChaCha8Rng::seed_from_u64(seed);
                    (random_ket(&mut rng, &screen.composite_shape()), Some(seed))
                }
            };
            single(build_hole_scenario_realistic(&phi, &screen)?, seed)
        }
        ModelConfig::HoleChain(c) => {
            let (first_screen, first) = build_hole_ideal(&c.first)?;
            let second_screen = c.second_screen.build()?;
            let between = match c.between_seed {
                Some(seed) => random_unitary(&mut ChaCha8Rng::seed_from_u64(seed), &first_screen.particle_shape()),
                None => Unitary::identity(first_screen.particle_shape()),
            };
            let fresh = match &c.second_psi {
                Some(a) => ket_from(second_screen.screen_shape(), a)?,
                None => second_screen.uniform_screen_ket(),
            };
            single(chain_two_holes(&first, &between, &second_screen, &fresh)?, c.between_seed)
        }
        ModelConfig::Random(r) => {
            let jobs: Vec<([usize; 2], u64)> = r
                .dims
                .iter()
                .flat_map(|&d| (0..r.count as u64).map(move |i| (d, r.seed.wrapping_add(i))))
                .collect();
            jobs.par_iter()
                .map(|&([d1, d2], seed)| {
                    generate_random_scenario::<f64>(seed, (d1, d2)).map(|bundle| Instance {
                        label: format!("{d1}x{d2}/seed={seed}"),
                        seed: Some(seed),
                        bundle,
                    })
                })
                .collect()
        }
    }
}

pub fn evaluate(
    inst: &Instance,
    pipelines: &[PipelineName],
    checks: &[CheckName],
    tol: &Tolerances<f64>,
) -> InstanceReport {
    let b = &inst.bundle;
    let spec = &b.spec;
    let shape = spec.composite_shape();

    let expected = b
        .expected
        .iter()
        .map(|e| {
            let actual = match e.name.as_str() {
                "trigger_probability" => Some(spec.trigger_probability()),
                _ => None,
            };
            Measurement::at_most(e.name.clone(), actual.map(|a| (a - e.value).abs()), tol.prob)
        })
        .collect();

    let (pipeline_reports, agreement, finals) = run_pipelines(b, pipelines, tol);

    let region = b.region.as_ref().and_then(|r| {
        let lifted = r.lift(shape).ok()?;
        probability(&evolve(spec.state(), spec.evolution().u12()).ok()?, &lifted).ok()
    });
    let mut probabilities = Probabilities {
        trigger: spec.trigger_probability(),
        cumulative: b.cumulative_probability,
        region,
        twin_preparator: None,
        twin_object: None,
    };

    let checks = checks
        .iter()
        .map(|&c| match c {
            CheckName::Raio => raio_check(b, tol),
            CheckName::Twins => {
                let (report, probs) = twins_check(b, tol);
                if let Some((p, q)) = probs {
                    probabilities.twin_preparator = Some(p);
                    probabilities.twin_object = Some(q);
                }
                report
            }
            CheckName::Factorization => factorization_check(b, inst.seed.unwrap_or(0), tol),
            CheckName::Eq10 => eq10_check(b, tol),
            CheckName::Structure => structure_check(b, &finals, tol),
        })
        .collect();

    InstanceReport {
        label: inst.label.clone(),
        seed: inst.seed,
        dims: [shape.factor_dim(0), shape.factor_dim(1)],
        probabilities,
        expected,
        pipelines: pipeline_reports,
        agreement,
        checks,
    }
}

fn run_pipelines(
    b: &ScenarioBundle64,
    names: &[PipelineName],
    tol: &Tolerances<f64>,
) -> (Vec<PipelineReport>, Option<Agreement>, Vec<DensityOperator<f64>>) {
    if names.is_empty() {
        return (Vec::new(), None, Vec::new());
    }
    let mut kinds = Vec::new();
    let mut reports: Vec<Option<PipelineReport>> = Vec::new();
    for name in names {
        let kind = match name {
            PipelineName::FirstKind => Some(PipelineKind::FirstKind),
            PipelineName::RelativeCollapse => Some(PipelineKind::RelativeCollapse),
            PipelineName::SecondKind => b.region.clone().map(|region| PipelineKind::SecondKind { region }),
        };
        match kind {
            Some(k) => {
                kinds.push(k);
                reports.push(None);
            }
            None => reports.push(Some(PipelineReport {
                name: name.as_str().to_owned(),
                final_state: None,
                event_probability: None,
                error: Some("scenario defines no region event".into()),
            })),
        }
    }
    let cmp = PipelineComparison::run(&b.spec, &kinds, tol);
    let mut finals = Vec::new();
    let mut outcomes = cmp.outcomes.iter();
    let reports: Vec<PipelineReport> = reports
        .into_iter()
        .map(|slot| {
            slot.unwrap_or_else(|| {
                let (label, result) = outcomes.next().expect("one outcome per runnable pipeline");
                match result {
                    Ok(o) => {
                        finals.push(o.final_state.clone());
                        PipelineReport {
                            name: label.as_str().to_owned(),
                            final_state: Some(matrix_to_rows(o.final_state.matrix())),
                            event_probability: Some(o.event_probability),
                            error: None,
                        }
                    }
                    Err(e) => PipelineReport {
                        name: label.as_str().to_owned(),
                        final_state: None,
                        event_probability: None,
                        error: Some(e.to_string()),
                    },
                }
            })
        })
        .collect();
    let all_ok = reports.iter().all(|r| r.error.is_none());
    let max_distance = cmp.max_distance();
    let agreement = Agreement {
        pairwise: cmp
            .pairwise
            .iter()
            .map(|(a, b, d)| PairwiseDistance {
                a: a.as_str().to_owned(),
                b: b.as_str().to_owned(),
                trace_distance: *d,
            })
            .collect(),
        max_distance,
        tolerance: cmp.tolerance,
        passed: all_ok && max_distance.is_none_or(|d| d <= cmp.tolerance),
    };
    (reports, Some(agreement), finals)
}

fn raio_check(b: &ScenarioBundle64, tol: &Tolerances<f64>) -> CheckReport {
    let name = CheckName::Raio.as_str();
    let Some(region) = &b.region else {
        return CheckReport::failed(name, "scenario defines no region event".into());
    };
    match verify_raio(&b.spec, region, tol) {
        Ok(r) => {
            // an impossible complement makes the exclusion vacuous
            let complement = r.region_prob_given_complement.map_or(0.0, f64::abs);
            let report = CheckReport::from_measurements(
                name,
                vec![
                    Measurement::at_most(
                        "trigger_implies_region_gap",
                        Some((r.region_prob_given_trigger - 1.0).abs()),
                        r.tolerance,
                    ),
                    Measurement::at_most("complement_region_probability", Some(complement), r.tolerance),
                    Measurement::at_most("trace_distance", r.distance, r.tolerance),
                ],
                r.diagnostic.clone(),
            );
            debug_assert_eq!(report.passed, r.verdict);
            report
        }
        Err(e) => CheckReport::failed(name, e.to_string()),
    }
}

fn twins_check(b: &ScenarioBundle64, tol: &Tolerances<f64>) -> (CheckReport, Option<(f64, f64)>) {
    let name = CheckName::Twins.as_str();
    let Some(twin) = &b.twin else {
        return (CheckReport::failed(name, "scenario defines no twin event".into()), None);
    };
    match twin_events_check(b.spec.state(), b.spec.trigger(), twin, tol) {
        Ok(t) => (
            CheckReport::from_measurements(
                name,
                vec![
                    Measurement::at_most("probability_gap", Some((t.prob_p - t.prob_q).abs()), tol.alg),
                    Measurement::at_most("post_state_distance", t.state_distance, tol.alg),
                ],
                None,
            ),
            Some((t.prob_p, t.prob_q)),
        ),
        Err(e) => (CheckReport::failed(name, e.to_string()), None),
    }
}

/// Deviation of the actual evolution, short versus long route for the
/// evolved conditional state, and a generic composite unitary that must
/// not factorize.
fn factorization_check(b: &ScenarioBundle64, seed: u64, tol: &Tolerances<f64>) -> CheckReport {
    let name = CheckName::Factorization.as_str();
    let spec = &b.spec;
    let ev = spec.evolution();
    let deviation = factorization_deviation(ev, spec.trigger()).ok();

    let long_route = lueders_collapse(spec.state(), &spec.lifted_trigger())
        .and_then(|c| evolve(&c.state, ev.u12()))
        .and_then(|s| partial_trace(&s, &[1]));
    let short_route = evolve_conditional(spec, tol);
    let (route, mut diagnostic) = match (long_route, short_route) {
        (Ok(l), Ok(s)) => (trace_distance(&l, &s).ok(), None),
        (Err(e), _) | (_, Err(e)) => (None, Some(e.to_string())),
    };

    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ CONTROL_SALT);
    let generic = random_unitary(&mut rng, spec.composite_shape());
    let control = FactorizedEvolution::new(generic, ev.u1().clone(), ev.u2().clone())
        .and_then(|c| factorization_deviation(&c, spec.trigger()));
    let control = match control {
        Ok(d) => Some(d),
        Err(e) => {
            diagnostic.get_or_insert_with(|| e.to_string());
            None
        }
    };

    CheckReport::from_measurements(
        name,
        vec![
            Measurement::at_most("deviation", deviation, tol.alg),
            Measurement::at_most("route_distance", route, tol.raio),
            Measurement::new("control_deviation", control, tol.alg, Bound::Above),
        ],
        diagnostic,
    )
}

fn eq10_check(b: &ScenarioBundle64, tol: &Tolerances<f64>) -> CheckReport {
    let name = CheckName::Eq10.as_str();
    match coincidence_probability(b.spec.state(), b.spec.trigger(), &b.probe) {
        Ok(c) => CheckReport::from_measurements(
            name,
            vec![Measurement::at_most("joint_minus_product", Some(c.discrepancy()), tol.alg)],
            None,
        ),
        Err(e) => CheckReport::failed(name, e.to_string()),
    }
}

fn density_violation(rho: &DensityOperator<f64>) -> f64 {
    hermitian_deviation(rho.matrix())
        .max((rho.trace() - 1.0).abs())
        .max(-rho.min_eigenvalue())
}

fn structure_check(b: &ScenarioBundle64, finals: &[DensityOperator<f64>], tol: &Tolerances<f64>) -> CheckReport {
    let s = b.structure();
    let mut m = vec![Measurement::at_most("completeness", Some(s.completeness), tol.alg)];
    if let Some(p) = s.particle_completeness {
        m.push(Measurement::at_most("particle_completeness", Some(p), tol.alg));
    }
    if let Some(r) = s.reconstruction {
        m.push(Measurement::at_most("reconstruction", Some(r), tol.alg));
    }
    let violation = std::iter::once(b.spec.state())
        .chain(std::iter::once(&b.prepared_state))
        .chain(finals)
        .map(density_violation)
        .fold(0.0, f64::max);
    m.push(Measurement::at_most("density_validity", Some(violation), tol.alg));
    CheckReport::from_measurements(CheckName::Structure.as_str(), m, None)
}
