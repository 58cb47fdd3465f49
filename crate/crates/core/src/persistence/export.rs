//! Flattening a game log into CSV for analysis.

use std::io::Write;
use std::path::Path;

use super::log::{read_log, EventRecord};
use super::PersistError;

const HEADER: [&str; 9] = [
    "seq",
    "wall_time",
    "game_id",
    "room_id",
    "actor",
    "code",
    "rejected",
    "post_state_hash",
    "payload",
];

/// One row per command record; `payload` holds the compact JSON payload.
pub fn write_csv(records: &[EventRecord], out: impl Write) -> Result<(), PersistError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(HEADER)?;
    for r in records {
        let payload = if r.payload.is_null() { String::new() } else { r.payload.to_string() };
        w.write_record([
            r.seq.to_string().as_str(),
            &r.wall_time.to_string(),
            &r.game_id,
            &r.room_id,
            r.actor.as_deref().unwrap_or(""),
            &r.code,
            r.rejected.as_deref().unwrap_or(""),
            &r.post_state_hash,
            &payload,
        ])?;
    }
    w.flush().map_err(|e| PersistError::Csv(e.into()))?;
    Ok(())
}

pub fn export_file(log: &Path, csv_path: &Path) -> Result<usize, PersistError> {
    let (_, records) = read_log(log)?;
    let file = std::fs::File::create(csv_path).map_err(PersistError::io(csv_path))?;
    write_csv(&records, file)?;
    Ok(records.len())
}
