use std::path::PathBuf;

use proptest::prelude::*;
use spincool::config::{ConfigError, ExperimentConfig, Protocol, TransferConfig};
use spincool_core::algorithms::PtModel;

fn configs_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("configs")
}

fn bundled() -> Vec<(String, ExperimentConfig)> {
    let mut out: Vec<_> = std::fs::read_dir(configs_dir())
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "toml"))
        .map(|p| {
            let cfg = ExperimentConfig::load(&p).unwrap_or_else(|e| panic!("{}: {e}", p.display()));
            (p.file_name().unwrap().to_string_lossy().into_owned(), cfg)
        })
        .collect();
    out.sort_by(|a, b| a.0.cmp(&b.0));
    out
}

#[test]
fn bundled_configs_round_trip() {
    let all = bundled();
    assert!(all.len() >= 7);
    for (name, cfg) in all {
        let text = cfg.to_toml();
        let back = ExperimentConfig::from_toml(&text).unwrap_or_else(|e| panic!("{name}: {e}\n{text}"));
        assert_eq!(back, cfg, "{name}");
    }
}

fn base() -> String {
    std::fs::read_to_string(configs_dir().join("tce_sim.toml")).unwrap()
}

fn with_protocol(protocol: &str) -> String {
    let text = base();
    let start = text.find("[protocol]").unwrap();
    let end = text[start..].find("\n[[outputs]]").map_or(text.len(), |e| start + e);
    format!("{}{}\n{}", &text[..start], protocol, &text[end..])
}

#[test]
fn every_protocol_round_trips() {
    let cases = [
        "[protocol]\nname = \"potent\"\nt1 = 8.0\nt2 = 12.0\npt_model = \"practical\"\nefficiencies = [0.9, 0.7, 0.75]",
        "[protocol]\nname = \"single_reset\"\ntarget = \"C2\"\nt = 3.0",
        "[protocol]\nname = \"truncated_potent\"\nt1 = 11.2",
        "[protocol]\nname = \"pac2\"\nn_spins = 5",
        "[protocol]\nname = \"optimal_ac\"\nn_spins = 6",
        "[protocol]\nname = \"pac2_finite_r\"\nr = 10.0\nd = 3.0",
        "[protocol]\nname = \"compress_tce\"\nmode = \"optimal\"\nbiases = [4.0, 4.0, 4.0]",
        "[protocol]\nname = \"sequence\"\nstate_model = \"full-state\"\n\
         [[protocol.steps]]\nop = \"PT\"\nsource = \"H\"\ntarget = \"C2\"\n\
         [[protocol.steps]]\nop = \"WAIT\"\nseconds = 2.5\n\
         [[protocol.steps]]\nop = \"RESET\"\nspins = [\"H\"]",
    ];
    for p in cases {
        let cfg = ExperimentConfig::from_toml(&with_protocol(p)).unwrap_or_else(|e| panic!("{p}: {e}"));
        assert_eq!(ExperimentConfig::from_toml(&cfg.to_toml()).unwrap(), cfg, "{p}");
    }
}

#[test]
fn rejects_bad_configs() {
    let invalid = |text: &str| ExperimentConfig::from_toml(text).unwrap_err();

    assert!(matches!(invalid(&with_protocol("[protocol]\nname = \"warp\"")), ConfigError::Parse(_)));
    assert!(matches!(invalid(&format!("{}\nbogus = 1\n", base())), ConfigError::Parse(_)));
    let e = invalid(&with_protocol("[protocol]\nname = \"single_reset\"\ntarget = \"N\"\nt = 1.0"));
    assert!(matches!(e, ConfigError::Core(_)), "{e}");
    let e = invalid(&with_protocol("[protocol]\nname = \"pac2\"\nn_spins = 5\n[grid]\nstep = 0.1"));
    assert!(e.to_string().contains("grid"), "{e}");
    let dup = format!("{}\n[[outputs]]\nkind = \"report\"\npath = \"x.json\"\n", base());
    let e = invalid(&format!("{dup}\n[[outputs]]\nkind = \"report\"\npath = \"x.json\"\n"));
    assert!(e.to_string().contains("twice"), "{e}");
    let e = invalid(&format!("{}\n[[outputs]]\nkind = \"surface\"\npath = \"s.csv\"\n", base()));
    assert!(e.to_string().contains("[grid]"), "{e}");
    let e = invalid(&with_protocol("[protocol]\nname = \"potent\"\nt1 = 1.0\nt2 = 1.0\nefficiencies = [1.5, 1.0, 1.0]"));
    assert!(matches!(e, ConfigError::Core(_)), "{e}");
    assert!(matches!(ExperimentConfig::load(&configs_dir().join("missing.toml")), Err(ConfigError::Io { .. })));
}

proptest! {
    #[test]
    fn potent_parameters_round_trip(
        t1 in 0.0..100.0f64,
        t2 in 0.0..100.0f64,
        f in prop::array::uniform3(0.0..=1.0f64),
        practical in any::<bool>(),
    ) {
        let mut cfg = ExperimentConfig::from_toml(&base()).unwrap();
        cfg.protocol = Protocol::Potent {
            t1,
            t2,
            transfers: TransferConfig {
                pt_model: if practical { PtModel::Practical } else { PtModel::Ideal },
                efficiencies: Some(f),
                ..TransferConfig::default()
            },
        };
        prop_assert_eq!(ExperimentConfig::from_toml(&cfg.to_toml()).unwrap(), cfg);
    }
}
