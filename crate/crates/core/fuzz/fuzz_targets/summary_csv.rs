#![no_main]

use gp_lab::experiments::{read_summary_csv, write_summary_csv};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(rows) = read_summary_csv(data) else {
        return;
    };
    let mut buf = Vec::new();
    write_summary_csv(&rows, &mut buf).unwrap();
    let again = read_summary_csv(buf.as_slice()).unwrap();
    assert_eq!(again.len(), rows.len());
});
