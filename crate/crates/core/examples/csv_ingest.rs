//! Reads a historian export in the water-treatment layout (day-first
//! timestamps, an `Normal/Attack` label column, padded headers), picks an
//! interval, stitches two intervals together and writes the result back
//! out in the canonical layout.
//!
//! cargo run --example csv_ingest

use std::io::Cursor;

use mpscan::{concat, dataio::csv_string, dataio::read_csv_from, slice_interval, CsvOptions};

const EXPORT: &str = "\
 Timestamp,FIT101,LIT101,MV101,P101,P102,Normal/Attack
28/12/2015 10:00:00 AM,2.427,522.85,2,2,1,Normal
28/12/2015 10:00:01 AM,2.446,522.89,2,2,1,Normal
28/12/2015 10:00:02 AM,2.489,522.85,2,2,1,Normal
28/12/2015 10:00:03 AM,2.534,522.80,2,2,1,Normal
28/12/2015 10:00:04 AM,2.569,522.60,1,2,2,Attack
28/12/2015 10:00:05 AM,2.609,522.47,1,2,2,A ttack
28/12/2015 10:00:06 AM,2.637,522.31,2,2,1,Normal
";

fn main() -> mpscan::Result<()> {
    let log = read_csv_from(Cursor::new(EXPORT), &CsvOptions::default())?;
    println!("{} samples from t = {}", log.len(), log.start_time());
    for c in log.channels() {
        println!("  {:<7} {:?}", c.name(), c.kind());
    }
    println!("labels: {:?}", log.labels().unwrap_or_default());

    let actuators = read_csv_from(
        Cursor::new(EXPORT),
        &CsvOptions {
            channels: Some(vec!["MV101".into(), "P102".into()]),
            ..CsvOptions::default()
        },
    )?;
    let before = slice_interval(&actuators, 0, 2)?;
    let during = slice_interval(&actuators, 4, 5)?;
    let stitched = concat(&before, &during)?;
    print!("{}", csv_string(&stitched));
    Ok(())
}
