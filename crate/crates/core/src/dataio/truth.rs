//! Ground-truth attack files: `start,end,targets,category,affects_process`,
//! with `;`-separated targets and inclusive sample bounds.

use std::fmt::Write as _;
use std::path::Path;

use crate::detect::AttackInterval;
use crate::error::{Error, Result};
use crate::fsutil::{csv_error, write_atomic};

const HEADER: [&str; 5] = ["start", "end", "targets", "category", "affects_process"];

pub fn ground_truth_csv(attacks: &[AttackInterval]) -> String {
    let mut out = HEADER.join(",");
    out.push('\n');
    for a in attacks {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            a.start,
            a.end,
            a.targets.join(";"),
            a.category,
            a.affects_process
        );
    }
    out
}

pub fn write_ground_truth(path: &Path, attacks: &[AttackInterval]) -> Result<()> {
    write_atomic(path, ground_truth_csv(attacks).as_bytes())
}

pub fn read_ground_truth(path: &Path) -> Result<Vec<AttackInterval>> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| csv_error(path, e))?;
    let header: Vec<String> = reader
        .headers()
        .map_err(|e| csv_error(path, e))?
        .iter()
        .map(str::to_ascii_lowercase)
        .collect();
    if header != HEADER {
        return Err(Error::Schema(format!(
            "{}: expected header {}",
            path.display(),
            HEADER.join(",")
        )));
    }

    let mut out = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| csv_error(path, e))?;
        let line = record.position().map_or(0, |p| p.line());
        let bad = |k: usize, message: String| Error::Parse {
            line,
            column: HEADER[k].into(),
            message,
        };
        let int = |k: usize| -> Result<usize> {
            record[k]
                .parse()
                .map_err(|_| bad(k, format!("`{}` is not a sample index", &record[k])))
        };
        let start = int(0)?;
        let end = int(1)?;
        if start > end {
            return Err(bad(1, format!("end {end} precedes start {start}")));
        }
        let targets = record[2]
            .split(';')
            .map(str::trim)
            .filter(|t| !t.is_empty())
            .map(String::from)
            .collect();
        let category = record[3].parse().map_err(|e: Error| bad(3, e.to_string()))?;
        let affects_process = match record[4].to_ascii_lowercase().as_str() {
            "true" | "yes" | "1" => true,
            "false" | "no" | "0" => false,
            other => return Err(bad(4, format!("`{other}` is not a boolean"))),
        };
        out.push(AttackInterval {
            start,
            end,
            targets,
            category,
            affects_process,
        });
    }
    out.sort();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::detect::AttackCategory;

    #[test]
    fn round_trip() {
        let attacks = vec![
            AttackInterval {
                start: 10,
                end: 20,
                targets: vec!["P-101".into(), "P-102".into()],
                category: AttackCategory::Ssmp,
                affects_process: false,
            },
            AttackInterval {
                start: 30,
                end: 30,
                targets: vec!["MV-101".into()],
                category: AttackCategory::Sssp,
                affects_process: true,
            },
        ];
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("truth.csv");
        write_ground_truth(&path, &attacks).unwrap();
        assert_eq!(read_ground_truth(&path).unwrap(), attacks);
    }

    #[test]
    fn rejects_bad_rows() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("truth.csv");
        std::fs::write(
            &path,
            "start,end,targets,category,affects_process\n5,3,P-101,SSSP,true\n",
        )
        .unwrap();
        assert!(matches!(read_ground_truth(&path), Err(Error::Parse { .. })));
        std::fs::write(
            &path,
            "start,end,targets,category,affects_process\n1,3,P-101,XYZ,true\n",
        )
        .unwrap();
        assert!(matches!(read_ground_truth(&path), Err(Error::Parse { .. })));
        std::fs::write(&path, "begin,end\n1,2\n").unwrap();
        assert!(matches!(read_ground_truth(&path), Err(Error::Schema(_))));
        std::fs::write(&path, "start,end,targets,category,affects_process\n").unwrap();
        assert!(read_ground_truth(&path).unwrap().is_empty());
    }
}
