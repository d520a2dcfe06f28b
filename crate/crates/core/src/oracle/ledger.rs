use std::collections::BTreeMap;
use std::io::{self, Write};

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::game::{LoadAssignment, Path};
use crate::scalar::Scalar;

/// Count and log of accepted queries, with an optional budget.
#[derive(Debug, Clone)]
pub struct QueryLedger<Q, R> {
    log: Vec<(Q, R)>,
    budget: Option<usize>,
}

impl<Q, R> Default for QueryLedger<Q, R> {
    fn default() -> Self {
        Self { log: Vec::new(), budget: None }
    }
}

impl<Q, R> QueryLedger<Q, R> {
    pub fn with_budget(budget: Option<usize>) -> Self {
        Self { log: Vec::new(), budget }
    }

    pub fn count(&self) -> usize {
        self.log.len()
    }

    pub fn budget(&self) -> Option<usize> {
        self.budget
    }

    pub fn log(&self) -> &[(Q, R)] {
        &self.log
    }

    /// Fails with `BudgetExhausted` if one more query would exceed the budget.
    pub fn admit(&self) -> Result<()> {
        match self.budget {
            Some(budget) if self.log.len() >= budget => Err(Error::BudgetExhausted { budget }),
            _ => Ok(()),
        }
    }

    pub fn record(&mut self, query: Q, response: R) {
        self.log.push((query, response));
    }
}

impl<Q: TranscriptJson, R: TranscriptJson> QueryLedger<Q, R> {
    /// One JSON object `{"query": .., "response": ..}` per line.
    pub fn write_jsonl(&self, mut out: impl Write) -> io::Result<()> {
        for (i, (q, r)) in self.log.iter().enumerate() {
            let line = json!({ "index": i, "query": q.to_json(), "response": r.to_json() });
            writeln!(out, "{line}")?;
        }
        Ok(())
    }
}

/// JSON encoding of query payloads and responses for transcripts.
pub trait TranscriptJson {
    fn to_json(&self) -> Value;
}

impl TranscriptJson for Vec<usize> {
    fn to_json(&self) -> Value {
        json!(self)
    }
}

impl<S: Scalar> TranscriptJson for Vec<S> {
    fn to_json(&self) -> Value {
        Value::Array(self.iter().map(|v| Value::String(v.to_text())).collect())
    }
}

impl TranscriptJson for LoadAssignment {
    fn to_json(&self) -> Value {
        Value::Array(self.loads().iter().map(|(p, c)| json!({ "path": p.edges(), "load": c })).collect())
    }
}

impl<S: Scalar> TranscriptJson for BTreeMap<Path, S> {
    fn to_json(&self) -> Value {
        Value::Array(self.iter().map(|(p, c)| json!({ "path": p.edges(), "cost": c.to_text() })).collect())
    }
}
