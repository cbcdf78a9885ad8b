//! CSV ingestion of paired counts and the bundled football fixture.

use std::path::Path;

use crate::bdge::BivariatePoint;
use crate::error::{Error, Result};
use crate::fit::BivariateDataset;

const FIXTURE: &str = include_str!("../data/firontina_juventus.csv");

/// Scores 0..=3 cross-tabulated; the fixture must reproduce this at load.
pub const FIXTURE_CONTINGENCY: [[u64; 4]; 4] = [[1, 5, 0, 0], [1, 7, 5, 1], [0, 1, 1, 0], [1, 0, 1, 2]];

/// Goals of (Fiorentina, Juventus) over 26 Champions League meetings.
pub fn football_fixture() -> BivariateDataset {
    let data = parse_csv(FIXTURE).expect("bundled fixture parses");
    check_fixture(&data).expect("bundled fixture matches its contingency table");
    data
}

/// Verifies a dataset against [`FIXTURE_CONTINGENCY`].
pub fn check_fixture(data: &BivariateDataset) -> Result<()> {
    let table = data.contingency(4, 4);
    let diagonal: u64 = (0..4).map(|i| table[i][i]).sum();
    if data.len() != 26 || diagonal != 11 || table.iter().zip(FIXTURE_CONTINGENCY.iter()).any(|(a, b)| a[..] != b[..]) {
        return Err(Error::Io(format!(
            "fixture does not match the football contingency table (n = {}, diagonal = {diagonal})",
            data.len()
        )));
    }
    Ok(())
}

pub fn load_dataset<P: AsRef<Path>>(path: P) -> Result<BivariateDataset> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_csv(&text)
}

fn parse_count(field: &str, line: u64) -> Result<u32> {
    let v: i64 = field.parse().map_err(|_| Error::Parse { line, message: format!("'{field}' is not an integer") })?;
    if v < 0 {
        return Err(Error::Parse { line, message: format!("negative count {v}") });
    }
    u32::try_from(v).map_err(|_| Error::Parse { line, message: format!("count {v} too large") })
}

/// Two comma-separated non-negative integer columns with an optional
/// `x1,x2` header. Blank lines are skipped.
pub fn parse_csv(text: &str) -> Result<BivariateDataset> {
    let mut reader =
        csv::ReaderBuilder::new().has_headers(false).flexible(true).trim(csv::Trim::All).from_reader(text.as_bytes());
    let mut pairs = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record =
            record.map_err(|e| Error::Parse { line: e.position().map_or(0, |p| p.line()), message: e.to_string() })?;
        let line = record.position().map_or(i as u64 + 1, |p| p.line());
        if record.len() == 1 && record[0].is_empty() {
            continue;
        }
        if record.len() != 2 {
            return Err(Error::Parse { line, message: format!("expected 2 fields, found {}", record.len()) });
        }
        if i == 0 && record[0].eq_ignore_ascii_case("x1") && record[1].eq_ignore_ascii_case("x2") {
            continue;
        }
        pairs.push(BivariatePoint::new(parse_count(&record[0], line)?, parse_count(&record[1], line)?));
    }
    BivariateDataset::new(pairs)
}
