use std::collections::BTreeMap;
use std::fs;

use symlie::hj_series::build_series;
use symlie::integrators::*;
use symlie::io::*;
use symlie::learn::*;
use symlie::lie_so3::Vec3;
use symlie::phase_space::{PhasePoint, ReducedHamiltonian};
use symlie::{Error, Retraction};

fn mu0() -> Vec3 {
    Vec3::new(1.0, 0.5, 0.75)
}

#[test]
fn tg_trajectory_round_trips_exactly() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("traj.csv");
    let h = ReducedHamiltonian::default();
    let s = build_series(&h, 5, Retraction::Cayley).unwrap();
    let mut traj = integrate_series(&s, PhasePoint::at_identity(mu0()), 0.1, 25, &NewtonConfig::default()).unwrap();
    traj.metadata.seed = Some(3);
    write_tg_trajectory(&path, &traj, &h).unwrap();
    let back = read_tg_trajectory(&path).unwrap();
    assert_eq!(back, traj);

    let text = fs::read_to_string(&path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "# schema=trajectory-tg version=1.0");
    assert_eq!(
        lines.next().unwrap(),
        "t,g11,g12,g13,g21,g22,g23,g31,g32,g33,mu1,mu2,mu3,H,casimir,jl1,jl2,jl3"
    );
    assert_eq!(text.lines().count(), 2 + 26);
}

#[test]
fn lp_trajectory_round_trips_exactly() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("lp.csv");
    let h = ReducedHamiltonian::default();
    let traj = euler_reduced(&h, mu0(), 0.05, 40);
    write_lp_trajectory(&path, &traj, &h).unwrap();
    assert_eq!(read_lp_trajectory(&path).unwrap(), traj);
    assert!(sidecar_path(&path).exists());
}

#[test]
fn datasets_round_trip_with_provenance() {
    let dir = tempfile::tempdir().unwrap();
    let h = ReducedHamiltonian::default();
    let s = build_series(&h, 7, Retraction::Cayley).unwrap();
    let b = SeriesBisection::new(&s, 0.1);
    let cfg = NewtonConfig::default();

    let tg = generate_tg_dataset(|z| equivariant_map(&b, z, &cfg), 20, &TgSampling::default(), 1, 0.1, "series-7").unwrap();
    let tg = perturb_dataset(&tg, 0.05, 2).unwrap();
    let p = dir.path().join("tg.csv");
    write_tg_dataset(&p, &tg).unwrap();
    let back = read_tg_dataset(&p).unwrap();
    assert_eq!(back, tg);
    assert_eq!(back.provenance.sigma2, 0.05);

    let lp = generate_poisson_dataset(|m| poisson_map(&b, m, &cfg), 15, &Region::cube(-2.0, 2.0), 4, 0.1, "series-7").unwrap();
    let p = dir.path().join("lp.csv");
    write_poisson_dataset(&p, &lp).unwrap();
    assert_eq!(read_poisson_dataset(&p).unwrap(), lp);
}

#[test]
fn readers_reject_unknown_major_versions_and_schemas() {
    let dir = tempfile::tempdir().unwrap();
    let h = ReducedHamiltonian::default();
    let traj = euler_reduced(&h, mu0(), 0.05, 3);
    let path = dir.path().join("lp.csv");
    write_lp_trajectory(&path, &traj, &h).unwrap();

    let text = fs::read_to_string(&path).unwrap();
    fs::write(&path, text.replacen("version=1.0", "version=1.7", 1)).unwrap();
    assert!(read_lp_trajectory(&path).is_ok(), "minor bumps are readable");
    fs::write(&path, text.replacen("version=1.0", "version=2.0", 1)).unwrap();
    assert!(matches!(read_lp_trajectory(&path), Err(Error::Version { .. })));

    fs::write(&path, &text).unwrap();
    assert!(read_tg_trajectory(&path).is_err(), "schema mismatch");
    fs::write(&path, text.lines().skip(1).collect::<Vec<_>>().join("\n")).unwrap();
    assert!(matches!(read_lp_trajectory(&path), Err(Error::Version { .. })), "missing schema line");
}

#[test]
fn checkpoints_round_trip_every_model_kind() {
    let dir = tempfile::tempdir().unwrap();
    let models = [
        Model::Symmetric(SymmetricModel {
            net: ScalarNet::new(3, &[8, 4], 1).unwrap(),
            retraction: Retraction::Exp,
        }),
        Model::NonSymmetric(NonSymmetricModel {
            net: ScalarNet::new(6, &[5], 2).unwrap(),
        }),
        Model::Poisson(PoissonModel {
            net: ScalarNet::new(3, &[50, 10], 3).unwrap(),
            retraction: Retraction::Cayley,
        }),
    ];
    for (i, m) in models.iter().enumerate() {
        let mut metrics = BTreeMap::new();
        metrics.insert("test_mse".to_string(), 1.25e-3);
        let ck = Checkpoint::new(m, Some(0.1), Some(TrainConfig::default()), metrics);
        let path = dir.path().join(format!("m{i}.json"));
        save_checkpoint(&path, &ck).unwrap();
        let back = load_checkpoint(&path).unwrap();
        assert_eq!(back, ck);
        assert_eq!(&back.model().unwrap(), m);
        // Nothing is left behind by the atomic write.
        assert!(!dir.path().join(format!("m{i}.json.tmp")).exists());
    }
}

#[test]
fn checkpoint_with_future_major_version_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let m = Model::Poisson(PoissonModel {
        net: ScalarNet::new(3, &[4], 0).unwrap(),
        retraction: Retraction::Cayley,
    });
    let mut ck = Checkpoint::new(&m, None, None, BTreeMap::new());
    ck.format_version = "3.1".into();
    let path = dir.path().join("c.json");
    save_checkpoint(&path, &ck).unwrap();
    assert!(matches!(load_checkpoint(&path), Err(Error::Version { .. })));

    ck.format_version = CHECKPOINT_VERSION.into();
    ck.params.pop();
    save_checkpoint(&path, &ck).unwrap();
    assert!(load_checkpoint(&path).unwrap().model().is_err(), "parameter count must match the architecture");
}
