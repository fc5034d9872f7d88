#![no_main]

use gp_lab::experiments::{read_raw_csv, write_raw_csv};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(rows) = read_raw_csv(data) else { return };
    let mut buf = Vec::new();
    write_raw_csv(&rows, &mut buf).unwrap();
    assert_eq!(read_raw_csv(buf.as_slice()).unwrap(), rows);
});
