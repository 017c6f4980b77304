use rand::Rng;
use serde::{Deserialize, Serialize};

use super::dsl::Program;
use super::{SearchError, SearchProblem};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DbEntry {
    pub id: usize,
    pub program: Program,
    pub score: f64,
    /// Iteration that produced the entry; seeds are created at 0.
    pub created: u64,
}

/// Scored programs sampled by a softmax over scores.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProgramDatabase {
    entries: Vec<DbEntry>,
    temperature: f64,
}

pub const DEFAULT_TEMPERATURE: f64 = 0.1;

impl ProgramDatabase {
    pub fn new(temperature: f64) -> Result<ProgramDatabase, SearchError> {
        if !(temperature.is_finite() && temperature > 0.0) {
            return Err(SearchError::Config(format!("temperature must be positive, got {temperature}")));
        }
        Ok(ProgramDatabase { entries: Vec::new(), temperature })
    }

    /// A database holding the problem's trivial program.
    pub fn seeded<P: SearchProblem>(problem: &P, temperature: f64) -> Result<ProgramDatabase, SearchError> {
        let mut db = ProgramDatabase::new(temperature)?;
        let program = Program::parse(problem.seed_program())?;
        let (_, score) = problem.score_program(&program)?;
        db.insert(program, score, 0)?;
        Ok(db)
    }

    pub fn insert(&mut self, program: Program, score: f64, created: u64) -> Result<usize, SearchError> {
        if !score.is_finite() {
            return Err(SearchError::Score(format!("non-finite score {score}")));
        }
        let id = self.entries.len();
        self.entries.push(DbEntry { id, program, score, created });
        Ok(id)
    }

    pub fn entries(&self) -> &[DbEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn temperature(&self) -> f64 {
        self.temperature
    }

    /// Highest score, earliest entry on ties.
    pub fn best(&self) -> Option<&DbEntry> {
        self.entries.iter().reduce(|b, e| if e.score > b.score { e } else { b })
    }

    /// `exp(score / T)`, normalised.
    pub fn probabilities(&self) -> Vec<f64> {
        let Some(top) = self.best().map(|e| e.score) else {
            return Vec::new();
        };
        let w: Vec<f64> = self.entries.iter().map(|e| ((e.score - top) / self.temperature).exp()).collect();
        let total: f64 = w.iter().sum();
        w.into_iter().map(|x| x / total).collect()
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Option<&DbEntry> {
        let p = self.probabilities();
        let mut u: f64 = rng.gen();
        for (e, pi) in self.entries.iter().zip(&p) {
            if u < *pi {
                return Some(e);
            }
            u -= pi;
        }
        self.entries.last()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn db(scores: &[f64], t: f64) -> ProgramDatabase {
        let mut db = ProgramDatabase::new(t).unwrap();
        for (i, &s) in scores.iter().enumerate() {
            db.insert(Program::parse(&format!("[{i}]")).unwrap(), s, i as u64).unwrap();
        }
        db
    }

    #[test]
    fn probabilities_favour_higher_scores() {
        for t in [0.01, 0.1, 1.0, 10.0] {
            let d = db(&[1.0, 1.5, 1.2, 1.5, 1.49], t);
            let p = d.probabilities();
            assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            for i in 0..p.len() {
                for j in 0..p.len() {
                    let (si, sj) = (d.entries()[i].score, d.entries()[j].score);
                    if si > sj {
                        assert!(p[i] > p[j], "t={t} i={i} j={j}");
                    }
                    if si == sj {
                        assert_eq!(p[i], p[j]);
                    }
                }
            }
        }
    }

    #[test]
    fn sampling_and_best() {
        let d = db(&[1.0, 2.0, 2.0], 0.5);
        assert_eq!(d.best().unwrap().id, 1);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut hits = [0usize; 3];
        for _ in 0..3000 {
            hits[d.sample(&mut rng).unwrap().id] += 1;
        }
        assert!(hits[0] < hits[1] && hits[0] < hits[2]);
        assert!(ProgramDatabase::new(0.0).is_err());
        let mut e = ProgramDatabase::new(1.0).unwrap();
        assert!(e.insert(Program::parse("1").unwrap(), f64::NAN, 0).is_err());
        assert!(e.sample(&mut rng).is_none());
    }
}
