use serde::{Deserialize, Serialize};

use super::history::{inner_count, inner_index, outer_count, push_outer, push_shared, shared_count};
use super::{Executable, StageRunner};
use crate::error::{Error, Result};
use crate::model::{Alphabets, SystemModel};
use crate::prob::Prob;

/// Decoder lookup tables shared by the table-based strategy classes.
/// `inner[t - 1]` is indexed by `(y^t, z^{t-1})`, `outer[t - 1]` by `z^t`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Decoders {
    pub inner: Vec<Vec<usize>>,
    pub outer: Vec<Vec<usize>>,
}

impl Decoders {
    pub fn constant(a: &Alphabets, horizon: usize) -> Self {
        Decoders {
            inner: (1..=horizon).map(|t| vec![0; inner_count(a, t)]).collect(),
            outer: (1..=horizon).map(|t| vec![0; outer_count(a, t)]).collect(),
        }
    }

    pub(crate) fn check(&self, a: &Alphabets, horizon: usize) -> Result<()> {
        if self.inner.len() != horizon || self.outer.len() != horizon {
            return Err(Error::InvalidStrategy("decoder tables do not cover the horizon".into()));
        }
        for t in 1..=horizon {
            check_table(&self.inner[t - 1], inner_count(a, t), a.u_hat, "inner decoder", t)?;
            check_table(&self.outer[t - 1], outer_count(a, t), a.v_hat, "outer decoder", t)?;
        }
        Ok(())
    }
}

pub(crate) fn check_table(table: &[usize], len: usize, symbols: usize, what: &str, t: usize) -> Result<()> {
    if table.len() != len {
        return Err(Error::InvalidStrategy(format!(
            "{what} table at stage {t} has {} entries, expected {len}",
            table.len()
        )));
    }
    if let Some(bad) = table.iter().find(|&&x| x >= symbols) {
        return Err(Error::InvalidStrategy(format!("{what} at stage {t} emits symbol {bad} outside 0..{symbols}")));
    }
    Ok(())
}

/// Encoder `X_t = c_t(U_t, V_t, Y^{t-1}, Z^{t-1})` with table decoders.
///
/// `encoder[t - 1][h][s]` where `h` indexes the shared history.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MarkovStrategy {
    pub horizon: usize,
    pub encoder: Vec<Vec<Vec<usize>>>,
    pub decoders: Decoders,
}

impl MarkovStrategy {
    /// Everything maps to symbol 0.
    pub fn constant(a: &Alphabets, horizon: usize) -> Self {
        MarkovStrategy {
            horizon,
            encoder: (1..=horizon).map(|t| vec![vec![0; a.pairs()]; shared_count(a, t)]).collect(),
            decoders: Decoders::constant(a, horizon),
        }
    }

    pub fn validate(&self, a: &Alphabets, horizon: usize) -> Result<()> {
        if self.horizon != horizon || self.encoder.len() != horizon {
            return Err(Error::InvalidStrategy(format!("strategy horizon {} != model horizon {horizon}", self.horizon)));
        }
        for t in 1..=horizon {
            let stage = &self.encoder[t - 1];
            if stage.len() != shared_count(a, t) {
                return Err(Error::InvalidStrategy(format!("encoder stage {t} covers {} histories", stage.len())));
            }
            for row in stage {
                check_table(row, a.pairs(), a.x, "encoder", t)?;
            }
        }
        self.decoders.check(a, horizon)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct MarkovRunner<'a> {
    strategy: &'a MarkovStrategy,
    alphabets: Alphabets,
    t: usize,
    shared: usize,
    outer: usize,
    y: usize,
}

impl StageRunner for MarkovRunner<'_> {
    fn encode(&mut self, u: usize, v: usize) -> Result<usize> {
        Ok(self.strategy.encoder[self.t][self.shared][self.alphabets.pair(u, v)])
    }

    fn decode_inner(&mut self, y: usize) -> Result<usize> {
        self.y = y;
        Ok(self.strategy.decoders.inner[self.t][inner_index(&self.alphabets, self.shared, y)])
    }

    fn decode_outer(&mut self, z: usize) -> Result<usize> {
        let a = &self.alphabets;
        self.outer = push_outer(a, self.outer, z);
        let v_hat = self.strategy.decoders.outer[self.t][self.outer];
        self.shared = push_shared(a, self.shared, self.y, z);
        self.t += 1;
        Ok(v_hat)
    }
}

impl<S: Prob> Executable<S> for MarkovStrategy {
    type Runner<'a> = MarkovRunner<'a>;

    fn runner<'a>(&'a self, model: &'a SystemModel<S>) -> MarkovRunner<'a> {
        MarkovRunner { strategy: self, alphabets: model.alphabets, t: 0, shared: 0, outer: 0, y: 0 }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::Exact;
    use crate::model::{build_special_case, ScenarioChannel};

    #[test]
    fn executes_by_table_lookup() {
        let m = build_special_case(2, 2, 4, 2, ScenarioChannel::Noiseless).unwrap();
        let a = m.alphabets;
        let mut s = MarkovStrategy::constant(&a, 2);
        s.encoder[0][0] = vec![3, 2, 1, 0];
        let h = push_shared(&a, 0, 1, 1);
        s.encoder[1][h] = vec![0, 1, 2, 3];
        s.decoders.inner[1][inner_index(&a, h, 2)] = 1;
        s.decoders.outer[1][push_outer(&a, 1, 2)] = 1;
        s.validate(&a, 2).unwrap();

        let mut r = <MarkovStrategy as Executable<Exact>>::runner(&s, &m);
        assert_eq!(r.encode(1, 0).unwrap(), 1);
        r.decode_inner(1).unwrap();
        r.decode_outer(1).unwrap();
        assert_eq!(r.encode(1, 0).unwrap(), 2);
        assert_eq!(r.decode_inner(2).unwrap(), 1);
        assert_eq!(r.decode_outer(2).unwrap(), 1);
    }

    #[test]
    fn validation_rejects_out_of_range_symbols() {
        let a = Alphabets::uniform(2);
        let mut s = MarkovStrategy::constant(&a, 1);
        s.encoder[0][0][3] = 2;
        assert!(matches!(s.validate(&a, 1), Err(Error::InvalidStrategy(_))));
        let s = MarkovStrategy::constant(&a, 1);
        assert!(s.validate(&a, 2).is_err());
    }
}
