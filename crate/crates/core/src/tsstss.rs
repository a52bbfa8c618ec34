//! The two-stage teacher/student pipeline.
//!
//! 1. Teacher: SRC over the full training set. Its scores give the gate value
//!    `g*` (the winning class's score) and its squared class deviations pick
//!    the `M` candidate classes.
//! 2. Student: CRC over the samples of the candidate classes only, scored the
//!    same way, giving `s*`.
//! 3. Decision: if the labels agree, that label. Otherwise the student's
//!    label when `s* > g*` strictly, else the teacher's.
//!
//! `g*` and `s*` are means over different numbers of classes (all classes vs.
//! the candidates) and are compared as-is.

use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};

use crate::error::{Error, Result};
use crate::linsolve::{
    ridge_projector, ridge_projector_with_gram, DenseMatrix, RidgeProjector, SolverConfig,
};
use crate::represent::{
    class_residuals, classify_crc_with, classify_src, ClassId, Dataset, LabeledVerdict,
    ResidualVector, ScoreVector,
};
use crate::scalar::Scalar;

/// How many candidate classes the teacher hands to the student.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CandidateCount {
    /// `ceil(C / 2)` for `C` classes.
    #[default]
    Half,
    Fixed(usize),
}

impl CandidateCount {
    pub fn resolve(&self, num_classes: usize) -> Result<usize> {
        if num_classes == 0 {
            return Err(Error::invalid("no classes to select candidates from"));
        }
        let m = match *self {
            CandidateCount::Half => num_classes.div_ceil(2),
            CandidateCount::Fixed(m) => m,
        };
        if m == 0 || m > num_classes {
            return Err(Error::invalid(format!(
                "candidate count must be in 1..={num_classes}, got {m}"
            )));
        }
        Ok(m)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PipelineConfig<T> {
    pub solver: SolverConfig<T>,
    pub num_candidates: CandidateCount,
}

impl<T: Scalar> Default for PipelineConfig<T> {
    fn default() -> Self {
        Self {
            solver: SolverConfig::default(),
            num_candidates: CandidateCount::Half,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TeacherVerdict<T> {
    pub label: ClassId,
    /// `g*`: the maximum teacher score, i.e. the score of `label`.
    pub gate: T,
    pub scores: ScoreVector<T>,
    /// Squared class deviations used for candidate selection.
    pub deviations: ResidualVector<T>,
    /// Candidate classes, ascending.
    pub candidates: Vec<ClassId>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StudentVerdict<T> {
    pub label: ClassId,
    /// `s*`: the maximum student score over the candidate classes.
    pub top_score: T,
    pub scores: ScoreVector<T>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Provenance {
    Agreement,
    TeacherOverride,
    StudentOverride,
}

impl Provenance {
    pub fn as_str(&self) -> &'static str {
        match self {
            Provenance::Agreement => "agreement",
            Provenance::TeacherOverride => "teacher_override",
            Provenance::StudentOverride => "student_override",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Decision<T> {
    pub label: ClassId,
    pub provenance: Provenance,
    pub teacher: TeacherVerdict<T>,
    pub student: StudentVerdict<T>,
}

/// The `m` classes with the smallest squared deviation (ties to the lower
/// class id), returned in ascending class order.
pub fn select_candidates<T: Scalar>(
    deviations: &ResidualVector<T>,
    m: usize,
) -> Result<Vec<ClassId>> {
    if m == 0 || m > deviations.len() {
        return Err(Error::invalid(format!(
            "candidate count must be in 1..={}, got {m}",
            deviations.len()
        )));
    }
    let mut order: Vec<(T, ClassId)> = deviations
        .values()
        .iter()
        .copied()
        .zip(deviations.classes().iter().copied())
        .collect();
    order.sort_by(|a, b| {
        a.0.partial_cmp(&b.0)
            .expect("residuals are finite")
            .then(a.1.cmp(&b.1))
    });
    let mut picked: Vec<ClassId> = order.into_iter().take(m).map(|(_, c)| c).collect();
    picked.sort();
    Ok(picked)
}

fn teacher_from_src<T: Scalar>(
    train: &Dataset<T>,
    query: &[T],
    src: LabeledVerdict<T>,
    m: usize,
) -> Result<TeacherVerdict<T>> {
    let deviations = class_residuals(&src.coefficients, train, query, true)?;
    let candidates = select_candidates(&deviations, m)?;
    Ok(TeacherVerdict {
        label: src.label,
        gate: src.top_score(),
        scores: src.scores,
        deviations,
        candidates,
    })
}

/// SRC teacher: label, gate value, and candidate classes.
pub fn teacher_stage<T: Scalar>(
    train: &Dataset<T>,
    query: &[T],
    cfg: &PipelineConfig<T>,
) -> Result<TeacherVerdict<T>> {
    let m = cfg.num_candidates.resolve(train.num_classes())?;
    let src = classify_src(train, query, &cfg.solver)?;
    teacher_from_src(train, query, src, m)
}

/// CRC student restricted to the candidate classes.
pub fn student_stage<T: Scalar>(
    train: &Dataset<T>,
    candidates: &[ClassId],
    query: &[T],
    cfg: &PipelineConfig<T>,
) -> Result<StudentVerdict<T>> {
    let coder = CandidateCoder::build(train, candidates, cfg.solver.l2_penalty)?;
    coder.classify(query)
}

/// Final label from the two verdicts.
pub fn decide<T: Scalar>(teacher: TeacherVerdict<T>, student: StudentVerdict<T>) -> Decision<T> {
    let (label, provenance) = if teacher.label == student.label {
        (teacher.label, Provenance::Agreement)
    } else if student.top_score > teacher.gate {
        (student.label, Provenance::StudentOverride)
    } else {
        (teacher.label, Provenance::TeacherOverride)
    };
    Decision {
        label,
        provenance,
        teacher,
        student,
    }
}

/// One-shot two-stage classification. Prefer [`Pipeline`] for many queries
/// against the same training set: it reuses the candidate-set projectors.
pub fn classify<T: Scalar>(
    train: &Dataset<T>,
    query: &[T],
    cfg: &PipelineConfig<T>,
) -> Result<Decision<T>> {
    cfg.solver.validate()?;
    let teacher = teacher_stage(train, query, cfg)?;
    let student = student_stage(train, &teacher.candidates, query, cfg)?;
    Ok(decide(teacher, student))
}

/// Candidate-set dictionary plus its ridge projector.
#[derive(Debug)]
struct CandidateCoder<T> {
    data: Dataset<T>,
    projector: RidgeProjector<T>,
}

impl<T: Scalar> CandidateCoder<T> {
    fn build(train: &Dataset<T>, candidates: &[ClassId], l2_penalty: T) -> Result<Self> {
        if candidates.is_empty() {
            return Err(Error::invalid("candidate class list is empty"));
        }
        let data = train.restrict_to_classes(candidates)?;
        let projector = ridge_projector(data.features(), l2_penalty)?;
        Ok(Self { data, projector })
    }

    /// As `build`, cutting the candidate Gram out of the full one.
    fn build_with_gram(
        train: &Dataset<T>,
        gram: &DenseMatrix<T>,
        candidates: &[ClassId],
        l2_penalty: T,
    ) -> Result<Self> {
        if candidates.is_empty() {
            return Err(Error::invalid("candidate class list is empty"));
        }
        let data = train.restrict_to_classes(candidates)?;
        // restrict_to_classes keeps the original sample order.
        let idx: Vec<usize> = (0..train.len())
            .filter(|&j| candidates.contains(&train.labels()[j]))
            .collect();
        let projector =
            ridge_projector_with_gram(data.features(), gram.principal_submatrix(&idx), l2_penalty)?;
        Ok(Self { data, projector })
    }

    fn classify(&self, query: &[T]) -> Result<StudentVerdict<T>> {
        let crc = classify_crc_with(&self.data, &self.projector, query)?;
        Ok(StudentVerdict {
            label: crc.label,
            top_score: crc.top_score(),
            scores: crc.scores,
        })
    }
}

/// Two-stage classifier bound to one training set.
///
/// Student projectors are memoized per distinct candidate list in a
/// grow-only map, so classifying many queries only factors each candidate
/// Gram matrix once. Safe to share across threads.
#[derive(Debug)]
pub struct Pipeline<T> {
    train: Dataset<T>,
    config: PipelineConfig<T>,
    num_candidates: usize,
    coders: RwLock<HashMap<Vec<ClassId>, Arc<CandidateCoder<T>>>>,
    gram: OnceLock<DenseMatrix<T>>,
}

impl<T: Scalar> Pipeline<T> {
    pub fn new(train: Dataset<T>, config: PipelineConfig<T>) -> Result<Self> {
        config.solver.validate()?;
        let num_candidates = config.num_candidates.resolve(train.num_classes())?;
        Ok(Self {
            train,
            config,
            num_candidates,
            coders: RwLock::new(HashMap::new()),
            gram: OnceLock::new(),
        })
    }

    pub fn train(&self) -> &Dataset<T> {
        &self.train
    }

    pub fn config(&self) -> &PipelineConfig<T> {
        &self.config
    }

    /// Resolved `M`.
    pub fn num_candidates(&self) -> usize {
        self.num_candidates
    }

    pub fn cached_projectors(&self) -> usize {
        self.coders.read().expect("projector cache poisoned").len()
    }

    pub fn teacher(&self, query: &[T]) -> Result<TeacherVerdict<T>> {
        let src = classify_src(&self.train, query, &self.config.solver)?;
        self.teacher_from(query, src)
    }

    /// Teacher verdict from an SRC result already computed on this
    /// pipeline's training set with its solver settings.
    pub fn teacher_from(&self, query: &[T], src: LabeledVerdict<T>) -> Result<TeacherVerdict<T>> {
        teacher_from_src(&self.train, query, src, self.num_candidates)
    }

    pub fn student(&self, candidates: &[ClassId], query: &[T]) -> Result<StudentVerdict<T>> {
        self.coder(candidates)?.classify(query)
    }

    pub fn classify(&self, query: &[T]) -> Result<Decision<T>> {
        let teacher = self.teacher(query)?;
        let student = self.student(&teacher.candidates, query)?;
        Ok(decide(teacher, student))
    }

    fn coder(&self, candidates: &[ClassId]) -> Result<Arc<CandidateCoder<T>>> {
        if let Some(c) = self
            .coders
            .read()
            .expect("projector cache poisoned")
            .get(candidates)
        {
            return Ok(Arc::clone(c));
        }
        // Built outside the lock; a concurrent duplicate build is discarded
        // in favour of whichever insert landed first.
        let gram = self.gram.get_or_init(|| self.train.features().gram());
        let built = Arc::new(CandidateCoder::build_with_gram(
            &self.train,
            gram,
            candidates,
            self.config.solver.l2_penalty,
        )?);
        let mut map = self.coders.write().expect("projector cache poisoned");
        Ok(Arc::clone(map.entry(candidates.to_vec()).or_insert(built)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::represent::{confidence_scores, ResidualVector};

    fn residuals(values: &[f64], squared: bool) -> ResidualVector<f64> {
        let classes = (0..values.len() as u32).map(ClassId).collect();
        ResidualVector::new(classes, values.to_vec(), squared).unwrap()
    }

    #[test]
    fn half_rounds_up() {
        assert_eq!(CandidateCount::Half.resolve(3).unwrap(), 2);
        assert_eq!(CandidateCount::Half.resolve(10).unwrap(), 5);
        assert_eq!(CandidateCount::Half.resolve(276).unwrap(), 138);
        assert_eq!(CandidateCount::Half.resolve(1).unwrap(), 1);
        assert_eq!(CandidateCount::Fixed(4).resolve(4).unwrap(), 4);
        assert!(CandidateCount::Fixed(5).resolve(4).is_err());
        assert!(CandidateCount::Fixed(0).resolve(4).is_err());
        assert!(CandidateCount::Half.resolve(0).is_err());
    }

    #[test]
    fn candidate_selection() {
        // A=0, B=1, C=2
        let r = residuals(&[0.1, 0.9, 0.5], true);
        assert_eq!(
            select_candidates(&r, 2).unwrap(),
            vec![ClassId(0), ClassId(2)]
        );
        assert_eq!(select_candidates(&r, 3).unwrap().len(), 3);
        let tie = residuals(&[0.5, 0.5, 0.9], true);
        assert_eq!(select_candidates(&tie, 1).unwrap(), vec![ClassId(0)]);
        assert!(select_candidates(&r, 0).is_err());
        assert!(select_candidates(&r, 4).is_err());
    }

    fn verdicts(
        teacher_label: u32,
        gate: f64,
        student_label: u32,
        top: f64,
    ) -> (TeacherVerdict<f64>, StudentVerdict<f64>) {
        let scores = confidence_scores(&residuals(&[0.0, 0.0, 0.0, 0.0], false)).unwrap();
        let teacher = TeacherVerdict {
            label: ClassId(teacher_label),
            gate,
            scores: scores.clone(),
            deviations: residuals(&[0.0, 0.0, 0.0, 0.0], true),
            candidates: vec![ClassId(1), ClassId(2), ClassId(3)],
        };
        let student = StudentVerdict {
            label: ClassId(student_label),
            top_score: top,
            scores,
        };
        (teacher, student)
    }

    #[test]
    fn decision_branches() {
        let (t, s) = verdicts(3, 0.5, 3, 0.9);
        let d = decide(t, s);
        assert_eq!((d.label, d.provenance), (ClassId(3), Provenance::Agreement));

        let (t, s) = verdicts(1, 0.5, 2, 0.7);
        let d = decide(t, s);
        assert_eq!(
            (d.label, d.provenance),
            (ClassId(2), Provenance::StudentOverride)
        );

        let (t, s) = verdicts(1, 0.5, 2, 0.5);
        let d = decide(t, s);
        assert_eq!(
            (d.label, d.provenance),
            (ClassId(1), Provenance::TeacherOverride)
        );
    }

    #[test]
    fn single_candidate_student_scores_zero() {
        let train = Dataset::from_columns(
            &[[1.0, 0.0], [0.0, 1.0], [0.6, 0.8]],
            vec![ClassId(0), ClassId(1), ClassId(1)],
        )
        .unwrap();
        let s = student_stage(
            &train,
            &[ClassId(1)],
            &[1.0, 0.0],
            &PipelineConfig::default(),
        )
        .unwrap();
        assert_eq!(s.label, ClassId(1));
        assert_eq!(s.top_score, 0.0);
        assert!(student_stage(&train, &[], &[1.0, 0.0], &PipelineConfig::default()).is_err());
    }

    #[test]
    fn zero_query_gives_uniform_teacher() {
        let train = Dataset::from_columns(
            &[[1.0, 0.0], [0.0, 1.0], [0.6, 0.8], [0.8, -0.6]],
            vec![ClassId(0), ClassId(1), ClassId(2), ClassId(3)],
        )
        .unwrap();
        let cfg = PipelineConfig {
            num_candidates: CandidateCount::Fixed(2),
            ..PipelineConfig::default()
        };
        let t = teacher_stage(&train, &[0.0, 0.0], &cfg).unwrap();
        assert_eq!(t.gate, 0.0);
        assert_eq!(t.candidates, vec![ClassId(0), ClassId(1)]);
        assert_eq!(t.label, ClassId(0));
    }

    #[test]
    fn pipeline_memoizes_projectors() {
        let train = Dataset::from_columns(
            &[[1.0, 0.0], [0.0, 1.0], [0.6, 0.8], [0.8, -0.6]],
            vec![ClassId(0), ClassId(1), ClassId(2), ClassId(3)],
        )
        .unwrap();
        let p = Pipeline::new(train.clone(), PipelineConfig::default()).unwrap();
        assert_eq!(p.num_candidates(), 2);
        let a = p.classify(&[0.0, 1.0]).unwrap();
        let b = p.classify(&[0.0, 1.0]).unwrap();
        assert_eq!(a, b);
        assert_eq!(p.cached_projectors(), 1);
        assert_eq!(
            a,
            classify(&train, &[0.0, 1.0], &PipelineConfig::default()).unwrap()
        );
        assert_eq!(a.label, ClassId(1));
    }
}
