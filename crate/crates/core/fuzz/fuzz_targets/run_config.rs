#![no_main]

use gp_lab::RunConfig;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|text: &str| {
    let Ok(mut cfg) = RunConfig::from_json(text) else {
        return;
    };
    // Keep accepted configurations cheap enough to execute.
    cfg.max_iterations = cfg.max_iterations.min(200);
    if cfg.n > 64 || cfg.init.t_init().unwrap_or(0) > 512 {
        return;
    }
    if let Ok(result) = gp_lab::run(&cfg) {
        assert!(result.iterations_to_opt <= cfg.max_iterations);
        assert!(result.max_size >= result.final_size);
        assert!(result.final_fitness <= cfg.n);
    }
});
