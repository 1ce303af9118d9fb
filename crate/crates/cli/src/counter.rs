use std::collections::HashMap;

use num_bigint::BigUint;
use partavoid::cache::CountCache;
use partavoid::{formulas, CountRecord, SetPartition};

use crate::{CliError, ScanConfig};

/// Where a count came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Source {
    Cache,
    BlockRecursion,
    SingletonFormula,
    Enumeration,
    Oracle,
}

/// Cache-aware count provider.
///
/// One-block and all-singleton patterns use their exact closed forms, so
/// they reach far beyond the enumeration ceiling; everything else is
/// enumerated on a bounded worker pool. New results are appended to the
/// cache through this single writer.
pub struct Counter {
    cache: Option<CountCache>,
    pool: rayon::ThreadPool,
    enum_ceiling: usize,
    oracle_ceiling: usize,
    force_oracle: bool,
    // k -> f(0..) for the one-block pattern of size k
    block_tables: HashMap<usize, Vec<BigUint>>,
    computed: usize,
}

impl Counter {
    pub fn from_config(config: &ScanConfig) -> Result<Self, CliError> {
        config.validate()?;
        let cache = config.cache.as_ref().map(CountCache::open).transpose()?;
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(config.workers)
            .build()
            .map_err(|e| CliError::Invalid(e.to_string()))?;
        Ok(Counter {
            cache,
            pool,
            enum_ceiling: config.enum_ceiling,
            oracle_ceiling: config.oracle_ceiling,
            force_oracle: config.force_oracle,
            block_tables: HashMap::new(),
            computed: 0,
        })
    }

    /// Number of counts computed (not served from the cache) so far.
    pub fn computed(&self) -> usize {
        self.computed
    }

    pub fn count(&mut self, tau: &SetPartition, n: usize) -> Result<CountRecord, CliError> {
        Ok(self.count_with_source(tau, n)?.0)
    }

    pub fn count_with_source(
        &mut self,
        tau: &SetPartition,
        n: usize,
    ) -> Result<(CountRecord, Source), CliError> {
        if let Some(rec) = self.cache.as_ref().and_then(|c| c.get(tau, n)) {
            return Ok((rec, Source::Cache));
        }
        let (count, source) = self.compute(tau, n)?;
        self.computed += 1;
        let rec = CountRecord { tau: tau.clone(), n, count };
        if let Some(cache) = self.cache.as_mut() {
            cache.insert(&rec)?;
        }
        Ok((rec, source))
    }

    fn compute(&mut self, tau: &SetPartition, n: usize) -> Result<(BigUint, Source), CliError> {
        let k = tau.n();
        if self.force_oracle {
            if n > self.oracle_ceiling {
                return Err(CliError::Resource(format!(
                    "oracle n={n} exceeds ceiling {}",
                    self.oracle_ceiling
                )));
            }
            let rec = partavoid::count_avoiders_oracle(tau, n, self.oracle_ceiling)
                .map_err(|e| CliError::Resource(e.to_string()))?;
            return Ok((rec.count, Source::Oracle));
        }
        if k >= 2 && tau.num_blocks() == 1 {
            let table = self.block_tables.entry(k).or_default();
            if table.len() <= n {
                *table =
                    formulas::block_recursion_from_zero(k, n.max(2 * table.len())).expect("k >= 2");
            }
            return Ok((table[n].clone(), Source::BlockRecursion));
        }
        if k >= 2 && tau.num_blocks() == k {
            let c = formulas::singleton_count(k, n).expect("k >= 2");
            return Ok((c, Source::SingletonFormula));
        }
        if n > self.enum_ceiling {
            return Err(CliError::Resource(format!(
                "enumeration n={n} exceeds ceiling {}",
                self.enum_ceiling
            )));
        }
        let rec = self
            .pool
            .install(|| partavoid::count_avoiders(tau, n))
            .map_err(|e| CliError::Resource(e.to_string()))?;
        Ok((rec.count, Source::Enumeration))
    }
}
