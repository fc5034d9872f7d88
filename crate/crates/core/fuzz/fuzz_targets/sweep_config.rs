#![no_main]

use gp_lab::experiments::SweepConfig;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|text: &str| {
    if let Ok(cfg) = SweepConfig::from_json(text) {
        let cells = cfg.cells();
        assert_eq!(cells.len(), cfg.n_values.len() * cfg.t_init_values.len());
        for (n, t) in cells {
            cfg.run_config(n, t, 0).validate().unwrap();
        }
    }
});
