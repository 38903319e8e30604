use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::dm::{default_nw_lag, dm_test, DmResult};
use super::loss::{LossKind, LossSeries, LOSS_SPACE_NOTE};
use super::mcs::{mcs, BootstrapConfig, McsResult};
use crate::dataset::fmt_f64;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvaluationConfig {
    pub alpha: f64,
    pub bootstrap: BootstrapConfig,
    /// `None` selects `floor(1.5 · T^{1/3})`.
    pub nw_lag: Option<usize>,
}

impl Default for EvaluationConfig {
    fn default() -> Self {
        Self {
            alpha: 0.05,
            bootstrap: BootstrapConfig::default(),
            nw_lag: None,
        }
    }
}

/// Pairwise DM results; `cells[i][j]` compares `models[i]` (a) with `models[j]` (b).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DmMatrix {
    pub kind: LossKind,
    pub nw_lag: usize,
    pub models: Vec<String>,
    pub cells: Vec<Vec<Option<DmResult>>>,
}

impl DmMatrix {
    pub fn compute(losses: &[LossSeries], nw_lag: usize) -> Result<Self> {
        let kind = losses.first().map(|l| l.kind).ok_or_else(|| Error::Argument("no loss series".into()))?;
        let n = losses.len();
        let mut cells = vec![vec![None; n]; n];
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    cells[i][j] = Some(dm_test(&losses[i], &losses[j], nw_lag)?);
                }
            }
        }
        Ok(Self {
            kind,
            nw_lag,
            models: losses.iter().map(|l| l.model.clone()).collect(),
            cells,
        })
    }

    /// Square table: below the diagonal the statistic of (column − row)
    /// loss differentials, above it the two-sided p-value.
    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut out = format!(
            "{LOSS_SPACE_NOTE}\n# {} Diebold-Mariano, Newey-West lag {}; lower triangle: statistic of column minus row losses (negative favours the column model); upper triangle: p-value\nmodel,{}\n",
            self.kind.label(),
            self.nw_lag,
            self.models.join(",")
        );
        for (i, row_model) in self.models.iter().enumerate() {
            out.push_str(row_model);
            for j in 0..self.models.len() {
                out.push(',');
                if i > j {
                    out.push_str(&fmt_f64(self.cells[j][i].expect("off-diagonal").statistic));
                } else if i < j {
                    out.push_str(&fmt_f64(self.cells[i][j].expect("off-diagonal").p_value));
                }
            }
            out.push('\n');
        }
        write_text(path.as_ref(), &out)
    }
}

pub(crate) fn write_text(path: &Path, text: &str) -> Result<()> {
    let mut f = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    f.write_all(text.as_bytes()).map_err(|e| Error::io(path, e))
}

/// MSE/QLIKE levels, MCS p-values and DM matrices for a set of models.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub models: Vec<String>,
    pub mse: Vec<f64>,
    pub qlike: Vec<f64>,
    pub mcs_mse: McsResult,
    pub mcs_qlike: McsResult,
    pub dm_mse: DmMatrix,
    pub dm_qlike: DmMatrix,
}

impl EvaluationReport {
    /// `mse_losses[i]` and `qlike_losses[i]` belong to the same model.
    pub fn build(mse_losses: &[LossSeries], qlike_losses: &[LossSeries], config: &EvaluationConfig) -> Result<Self> {
        if mse_losses.len() != qlike_losses.len()
            || mse_losses.iter().zip(qlike_losses).any(|(a, b)| a.model != b.model)
        {
            return Err(Error::Argument("MSE and QLIKE loss sets name different models".into()));
        }
        let t = mse_losses.first().map_or(0, |l| l.losses.len());
        let lag = config.nw_lag.unwrap_or_else(|| default_nw_lag(t));
        Ok(Self {
            models: mse_losses.iter().map(|l| l.model.clone()).collect(),
            mse: mse_losses.iter().map(LossSeries::mean).collect(),
            qlike: qlike_losses.iter().map(LossSeries::mean).collect(),
            mcs_mse: mcs(mse_losses, config.alpha, config.bootstrap)?,
            mcs_qlike: mcs(qlike_losses, config.alpha, config.bootstrap)?,
            dm_mse: DmMatrix::compute(mse_losses, lag)?,
            dm_qlike: DmMatrix::compute(qlike_losses, lag)?,
        })
    }

    /// `model,MSE,P_MCS_MSE,QLIKE,P_MCS_QLIKE`; models inside the
    /// confidence set carry `*` in the `in_mcs` columns.
    pub fn write_mcs_table(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut out = format!(
            "{LOSS_SPACE_NOTE}\n# alpha = {}\nmodel,MSE,P_MCS_MSE,in_mcs_MSE,QLIKE,P_MCS_QLIKE,in_mcs_QLIKE\n",
            self.mcs_mse.alpha
        );
        for (i, m) in self.models.iter().enumerate() {
            let (pm, pq) = (self.mcs_mse.p_values[i], self.mcs_qlike.p_values[i]);
            let star = |p: f64, alpha: f64| if p >= alpha { "*" } else { "" };
            out.push_str(&format!(
                "{m},{},{},{},{},{},{}\n",
                fmt_f64(self.mse[i]),
                fmt_f64(pm),
                star(pm, self.mcs_mse.alpha),
                fmt_f64(self.qlike[i]),
                fmt_f64(pq),
                star(pq, self.mcs_qlike.alpha)
            ));
        }
        write_text(path.as_ref(), &out)
    }

    pub fn summary(&self) -> String {
        let mut s = format!("{LOSS_SPACE_NOTE}\n{:<8} {:>10} {:>8} {:>10} {:>8}\n", "model", "MSE", "P_MCS", "QLIKE", "P_MCS");
        for (i, m) in self.models.iter().enumerate() {
            s.push_str(&format!(
                "{:<8} {:>10.4} {:>8.3} {:>10.4} {:>8.3}\n",
                m, self.mse[i], self.mcs_mse.p_values[i], self.qlike[i], self.mcs_qlike.p_values[i]
            ));
        }
        s.push_str(&format!("MCS (MSE):   {}\n", self.mcs_mse.survivors.join(", ")));
        s.push_str(&format!("MCS (QLIKE): {}\n", self.mcs_qlike.survivors.join(", ")));
        s
    }
}
