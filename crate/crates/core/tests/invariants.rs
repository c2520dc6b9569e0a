use proptest::prelude::*;
use sps_core::engine::{Engine, EngineInput, FullPmeEngine, SecularEngine, Wants};
use sps_core::fom::{FiguresOfMerit, Numerics};
use sps_core::phonons::{PhononBath, PhononParams, Preset};
use sps_core::quantum::ops::{transition, DensityMatrix, Ket4, Level, Operator4, C64};
use sps_core::quantum::propagate::{propagate, FixedStepRk4, propagator_registry, Tolerances};
use sps_core::quantum::superop::{assemble_lindblad, Collapse};
use sps_core::system::SystemParams;
use sps_core::units::angular;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn hermitian(entries: &[f64]) -> Operator4 {
    let mut h = Operator4::zeros();
    let mut k = 0;
    for i in 0..4 {
        h[(i, i)] = c(entries[k], 0.0);
        k += 1;
        for j in i + 1..4 {
            h[(i, j)] = c(entries[k], entries[k + 1]);
            h[(j, i)] = h[(i, j)].conj();
            k += 2;
        }
    }
    h
}

fn normalized(amps: &[f64]) -> Ket4 {
    let k = Ket4::new(c(amps[0], amps[1]), c(amps[2], amps[3]), c(amps[4], amps[5]), c(amps[6], amps[7]));
    k / c(k.norm(), 0.0)
}

/// Amplitudes of a ket bounded away from zero.
fn amplitudes() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0f64..1.0, 8).prop_filter("zero ket", |a| a.iter().map(|x| x * x).sum::<f64>() > 0.01)
}

fn fom(engine: &dyn Engine, p: SystemParams, bath: Option<&PhononBath>, numerics: &Numerics) -> FiguresOfMerit {
    let input = EngineInput { params: p, bath, numerics, wants: Wants::default() };
    let out = engine.evaluate(&input).unwrap();
    let phys = out.diagnostics.physicality.expect("engines report physicality");
    assert!(phys.is_physical(), "{phys:?}");
    out.fom
}

fn drive(omega: f64, delta: f64) -> SystemParams {
    let p = SystemParams::default();
    p.with_drive(omega * p.gamma_x, delta * p.gamma_x)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn random_lindblad_propagation_stays_physical(
        h in prop::collection::vec(-2.0f64..2.0, 16),
        jumps in prop::collection::vec((0.0f64..1.5, 0usize..4, 0usize..4), 1..5),
        amps in amplitudes(),
        propagator in prop::sample::select(vec!["dopri5", "expm", "rk4"]),
    ) {
        let terms: Vec<Collapse> = jumps
            .iter()
            .map(|&(rate, a, b)| Collapse::new(rate, transition(level(a), level(b))))
            .collect();
        let l = assemble_lindblad(&hermitian(&h), &terms).unwrap();
        let rho0 = DensityMatrix::from_ket(&normalized(&amps));
        let times: Vec<f64> = (0..=40).map(|k| 0.1 * k as f64).collect();
        let traj = if propagator == "rk4" {
            // Fixed steps carry no error control; resolve the generator.
            let rk4 = FixedStepRk4 { step: 0.05 / l.matrix.norm() };
            propagate(&l, &rho0, &times, &rk4).unwrap()
        } else {
            let reg = propagator_registry(Tolerances::default());
            propagate(&l, &rho0, &times, reg.get(propagator).unwrap().as_ref()).unwrap()
        };
        let phys = traj.physicality();
        prop_assert!(phys.is_physical(), "{propagator}: {phys:?}");
    }

    #[test]
    fn propagators_agree(
        h in prop::collection::vec(-2.0f64..2.0, 16),
        rate in 0.05f64..1.0,
        amps in amplitudes(),
    ) {
        let l = assemble_lindblad(&hermitian(&h), &[Collapse::new(rate, transition(Level::G, Level::X))]).unwrap();
        let rho0 = DensityMatrix::from_ket(&normalized(&amps));
        let times = [0.0, 1.0, 3.0];
        let reg = propagator_registry(Tolerances { rtol: 1e-10, atol: 1e-12 });
        let a = propagate(&l, &rho0, &times, reg.get("dopri5").unwrap().as_ref()).unwrap();
        let b = propagate(&l, &rho0, &times, reg.get("expm").unwrap().as_ref()).unwrap();
        for (x, y) in a.states.iter().zip(&b.states) {
            prop_assert!((x - y).norm() < 1e-7);
        }
    }
}

fn level(k: usize) -> Level {
    [Level::G, Level::X, Level::Y, Level::B][k]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn figures_of_merit_are_bounded(omega in 20.0f64..150.0, delta in -150.0f64..150.0, set in 0usize..4) {
        let bath = match set {
            0 => None,
            k => Some(PhononBath::new(PhononParams::preset([Preset::I, Preset::II, Preset::III][k - 1])).unwrap()),
        };
        let f = fom(&SecularEngine, drive(omega, delta), bath.as_ref(), &Numerics::default());
        for v in [f.n, f.i, f.n_plus, f.n_minus, f.i_plus, f.i_minus].into_iter().flatten() {
            prop_assert!((-1e-9..=1.0 + 1e-9).contains(&v), "{f:?}");
        }
        let (n, np, nm) = (f.n.unwrap(), f.n_plus.unwrap(), f.n_minus.unwrap());
        prop_assert!((np + nm - n).abs() < 1e-9);
    }

    #[test]
    fn detuning_sign_mirrors_sidepeaks_without_phonons(omega in 20.0f64..100.0, delta in 5.0f64..100.0) {
        let num = Numerics::default();
        let a = fom(&SecularEngine, drive(omega, delta), None, &num);
        let b = fom(&SecularEngine, drive(omega, -delta), None, &num);
        let close = |x: Option<f64>, y: Option<f64>| (x.unwrap() - y.unwrap()).abs() < 1e-6;
        prop_assert!(close(a.n, b.n) && close(a.i, b.i));
        prop_assert!(close(a.i_plus, b.i_minus) && close(a.i_minus, b.i_plus));
        prop_assert!(close(a.n_plus, b.n_minus) && close(a.n_minus, b.n_plus));
    }

    #[test]
    fn cascade_population_decays_at_the_exciton_rate(omega in 0.0f64..100.0, delta in -100.0f64..100.0, phonons: bool) {
        let p = drive(omega, delta);
        let bath = phonons.then(|| PhononBath::new(PhononParams::preset(Preset::I)).unwrap());
        let l = FullPmeEngine::generator(&p, bath.as_ref()).unwrap();
        let gamma = angular(p.gamma_x);
        let times: Vec<f64> = (0..=30).map(|k| k as f64 * 0.2 / gamma).collect();
        let reg = propagator_registry(Tolerances::default());
        let traj = propagate(&l, &DensityMatrix::pure(Level::X), &times, reg.get("dopri5").unwrap().as_ref()).unwrap();
        for (k, &t) in times.iter().enumerate() {
            let rho = traj.state(k);
            let expected = (-gamma * t).exp() - rho.population(Level::X);
            prop_assert!((rho.population(Level::B) - expected).abs() < 1e-7, "t = {t}");
        }
    }
}

#[test]
fn halving_tolerances_changes_little() {
    let bath = PhononBath::new(PhononParams::preset(Preset::I)).unwrap();
    let coarse = Numerics::default();
    let fine = Numerics {
        tol: Tolerances { rtol: coarse.tol.rtol / 2.0, atol: coarse.tol.atol / 2.0 },
        tail_floor: coarse.tail_floor / 2.0,
        population_floor: coarse.population_floor / 2.0,
        ..coarse.clone()
    };
    for (omega, delta) in [(5.0, 0.0), (50.0, 0.0), (40.0, 200.0)] {
        for engine in [&SecularEngine as &dyn Engine, &FullPmeEngine] {
            let a = fom(engine, drive(omega, delta), Some(&bath), &coarse);
            let b = fom(engine, drive(omega, delta), Some(&bath), &fine);
            for (x, y) in [(a.n, b.n), (a.i, b.i), (a.i_plus, b.i_plus), (a.i_minus, b.i_minus)] {
                let (x, y) = (x.unwrap(), y.unwrap());
                assert!((x - y).abs() <= 1e-3 * y.abs(), "{}: Ω {omega}, δ {delta}: {x} vs {y}", engine.name());
            }
        }
    }
}

#[test]
fn phonons_favour_positive_detuning() {
    let bath = PhononBath::new(PhononParams::preset(Preset::I)).unwrap();
    let num = Numerics::default();
    for delta in [60.0, 200.0] {
        let above = fom(&SecularEngine, drive(30.0, delta), Some(&bath), &num);
        let below = fom(&SecularEngine, drive(30.0, -delta), Some(&bath), &num);
        assert!(above.dominant_i(delta).unwrap() > below.dominant_i(-delta).unwrap());
        assert!(above.i.unwrap() > below.i.unwrap());
    }
}
