use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScheduleMode {
    Paper,
    Minimal,
    Custom,
}

/// A user-supplied space-requirement table; budgets follow the usual
/// recurrences.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CustomTable {
    pub d0: usize,
    /// `delta[k][i]` for `0 ≤ k ≤ ℓ`, `0 ≤ i ≤ 2ℓ`. A single row is reused
    /// for every century.
    pub delta: Vec<Vec<usize>>,
}

/// Space requirements `δ_k` and budgets `(α_k, β_k)` for every century.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Schedule {
    pub c: usize,
    pub ell: usize,
    pub d0: usize,
    pub delta: Vec<Vec<usize>>,
    pub alpha: Vec<usize>,
    pub beta: Vec<usize>,
    pub mode: ScheduleMode,
}

fn overflow() -> Error {
    Error::Schedule("constants overflow".into())
}

fn pow3(e: usize) -> Result<usize> {
    u32::try_from(e).ok().and_then(|e| 3usize.checked_pow(e)).ok_or_else(overflow)
}

fn mul(a: usize, b: usize) -> Result<usize> {
    a.checked_mul(b).ok_or_else(overflow)
}

impl Schedule {
    /// `δ_k(i)`, with `i` clamped into `0..=2ℓ`. Sums of ranks can dip
    /// below zero only for a pair of houses in century 0, which never
    /// occurs.
    pub fn delta_at(&self, k: usize, i: isize) -> usize {
        let i = i.clamp(0, 2 * self.ell as isize) as usize;
        self.delta[k.min(self.ell)][i]
    }

    pub fn budget(&self, k: usize) -> (usize, usize) {
        (self.alpha[k], self.beta[k])
    }

    /// The bound claimed for the final certificate.
    pub fn final_bound(&self) -> (usize, usize) {
        (self.alpha[self.ell], self.beta[self.ell].saturating_sub(self.d0))
    }

    /// Whether `δ_k(2ℓ) ≥ δ_{k+1}(2k)` for every `k < ℓ`.
    pub fn cross_century_monotone(&self) -> bool {
        (0..self.ell).all(|k| self.delta[k][2 * self.ell] >= self.delta[k + 1][2 * k])
    }

    /// Castle budget `(8α, β + (ℓ−k)d0)`.
    pub fn castle_bound(&self, k: usize) -> (usize, usize) {
        (8 * self.alpha[k], self.beta[k] + (self.ell - k) * self.d0)
    }

    /// Province budget `(7(ℓ−k)3^(ℓ−k)α, β + 2(ℓ−k−1)d0)` of a small government.
    pub fn small_bound(&self, k: usize) -> (usize, usize) {
        let s = self.ell - k;
        (
            7 * s * 3usize.pow(s as u32) * self.alpha[k],
            self.beta[k] + 2 * s.saturating_sub(1) * self.d0,
        )
    }

    /// Longest passage considered in century `k`.
    pub fn passage_len(&self, k: usize) -> usize {
        (self.ell - k) * self.d0 + 1
    }

    fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Schedule(msg));
        let (c, ell) = (self.c, self.ell);
        if self.delta.len() != ell + 1 {
            return bad(format!("need {} rows of δ, got {}", ell + 1, self.delta.len()));
        }
        for (k, row) in self.delta.iter().enumerate() {
            if row.len() != 2 * ell + 1 {
                return bad(format!("row {k} of δ has {} entries, need {}", row.len(), 2 * ell + 1));
            }
            let lo = (2 * k).saturating_sub(2);
            for i in lo..2 * ell {
                if row[i] < 2 * row[i + 1] + 2 {
                    return bad(format!("δ_{k}({i}) = {} is below 2δ_{k}({}) + 2 = {}", row[i], i + 1, 2 * row[i + 1] + 2));
                }
            }
            if let Some(i) = (0..=2 * ell).find(|&i| row[i] > self.d0) {
                return bad(format!("δ_{k}({i}) = {} exceeds d0 = {}", row[i], self.d0));
            }
            if row[2 * ell] < 5 * c {
                return bad(format!("δ_{k}({}) = {} is below 5c = {}", 2 * ell, row[2 * ell], 5 * c));
            }
        }
        if self.mode == ScheduleMode::Paper && !self.cross_century_monotone() {
            return bad("separation is not monotone across centuries".into());
        }
        Ok(())
    }
}

fn budgets(ell: usize, d0: usize) -> Result<(Vec<usize>, Vec<usize>)> {
    let mut alpha = vec![1usize];
    let mut beta = vec![1usize];
    for k in 0..ell {
        let s = ell - k;
        alpha.push(mul(mul(7 * s, pow3(s)?)?, alpha[k])?);
        beta.push(beta[k].checked_add(mul(2 * (s + 1), d0)?).ok_or_else(overflow)?);
    }
    Ok((alpha, beta))
}

/// Builds and validates the schedule for `mode`; `table` is required for
/// [`ScheduleMode::Custom`] and ignored otherwise.
pub fn make_schedule(c: usize, ell: usize, mode: ScheduleMode, table: Option<&CustomTable>) -> Result<Schedule> {
    if c < 2 {
        return Err(Error::Schedule(format!("c = {c} is below 2")));
    }
    if ell < 1 {
        return Err(Error::Schedule("ℓ must be at least 1".into()));
    }
    let (d0, delta) = match mode {
        ScheduleMode::Paper => {
            let top = 2 * ell * (ell + 1);
            let d0 = mul(5 * c, pow3(top)?)?;
            let mut delta = Vec::new();
            for k in 0..=ell {
                let e = 2 * ell * (ell + 1 - k);
                delta.push((0..=2 * ell).map(|i| mul(5 * c, pow3(e - i)?)).collect::<Result<Vec<_>>>()?);
            }
            (d0, delta)
        }
        ScheduleMode::Minimal => {
            let mut row = vec![0usize; 2 * ell + 1];
            row[2 * ell] = 5 * c;
            for i in (0..2 * ell).rev() {
                row[i] = mul(2, row[i + 1])?.checked_add(2).ok_or_else(overflow)?;
            }
            (row[0], vec![row; ell + 1])
        }
        ScheduleMode::Custom => {
            let t = table.ok_or_else(|| Error::Schedule("custom mode needs a table".into()))?;
            let delta = if t.delta.len() == 1 { vec![t.delta[0].clone(); ell + 1] } else { t.delta.clone() };
            (t.d0, delta)
        }
    };
    let (alpha, beta) = budgets(ell, d0)?;
    let s = Schedule {
        c,
        ell,
        d0,
        delta,
        alpha,
        beta,
        mode,
    };
    s.validate()?;
    Ok(s)
}
