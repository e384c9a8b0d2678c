//! CSV documents with a provenance comment.

use crate::{CliError, RunConfig};

/// A CSV document: comment lines, a header row and data rows.
#[derive(Debug)]
pub struct Table {
    comments: Vec<String>,
    writer: csv::Writer<Vec<u8>>,
}

impl Table {
    pub fn new(cfg: &RunConfig, header: &[&str]) -> Result<Self, CliError> {
        let m = &cfg.model;
        let comments = vec![
            format!("srbm-green v{} seed={} nodes={}", env!("CARGO_PKG_VERSION"), cfg.sim.seed, cfg.quadrature_nodes),
            format!(
                "sigma11={:?} sigma12={:?} sigma22={:?} mu1={:?} mu2={:?} r12={:?} r21={:?} x1={:?} x2={:?} tol={:?} dt={:?} tmax={:?} paths={}",
                m.sigma11, m.sigma12, m.sigma22, m.mu1, m.mu2, m.r12, m.r21, m.x1, m.x2,
                cfg.quadrature_tol, cfg.sim.dt, cfg.sim.t_max, cfg.sim.paths
            ),
        ];
        let mut writer = csv::Writer::from_writer(Vec::new());
        writer.write_record(header)?;
        Ok(Self { comments, writer })
    }

    pub fn comment(&mut self, line: impl Into<String>) {
        self.comments.push(line.into());
    }

    pub fn row<I, S>(&mut self, fields: I) -> Result<(), CliError>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<[u8]>,
    {
        self.writer.write_record(fields)?;
        Ok(())
    }

    pub fn finish(self) -> Result<String, CliError> {
        let body = self.writer.into_inner().map_err(|e| CliError::Io(e.into_error()))?;
        let mut out = String::new();
        for c in &self.comments {
            out.push_str("# ");
            out.push_str(c);
            out.push('\n');
        }
        out.push_str(&String::from_utf8(body).expect("CSV output is UTF-8"));
        Ok(out)
    }
}

/// Shortest round-tripping form, switching to exponent notation for very
/// small and very large magnitudes.
pub fn num(x: f64) -> String {
    format!("{x:?}")
}
