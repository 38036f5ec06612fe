//! Multiclass SVM evaluation under leave-one-subject-out cross-validation.
//!
//! One-vs-one machines trained by SMO, linear or exponential chi-square
//! kernel, majority voting with ties broken toward the lowest class
//! index. Classes and subjects are ordered by sorted name so results do
//! not depend on sample order.

mod svm;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use svm::{solve, SmoProblem};

pub const KKT_TOLERANCE: f64 = 1e-3;
pub const MAX_SMO_STEPS: usize = 1_000_000;
/// Guard against division by zero in the chi-square distance.
pub const CHI_SQUARE_EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelKind {
    Linear,
    ChiSquare,
}

/// Kernel bandwidth: a fixed positive value or per-fold "auto"
/// (reciprocal mean pairwise chi-square distance of the training set).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GammaRepr", into = "GammaRepr")]
pub enum Gamma {
    Auto,
    Fixed(f64),
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum GammaRepr {
    Num(f64),
    Tag(String),
}

impl TryFrom<GammaRepr> for Gamma {
    type Error = String;
    fn try_from(v: GammaRepr) -> std::result::Result<Self, String> {
        match v {
            GammaRepr::Num(g) => Ok(Gamma::Fixed(g)),
            GammaRepr::Tag(s) if s == "auto" => Ok(Gamma::Auto),
            GammaRepr::Tag(s) => Err(format!("gamma must be a number or \"auto\", got {s:?}")),
        }
    }
}

impl From<Gamma> for GammaRepr {
    fn from(g: Gamma) -> Self {
        match g {
            Gamma::Auto => GammaRepr::Tag("auto".into()),
            Gamma::Fixed(v) => GammaRepr::Num(v),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelSpec {
    pub kind: KernelKind,
    pub gamma: Gamma,
    pub c: f64,
}

impl KernelSpec {
    pub fn linear() -> Self {
        KernelSpec {
            kind: KernelKind::Linear,
            gamma: Gamma::Fixed(1.0),
            c: 1.0,
        }
    }

    pub fn chi_square(gamma: Gamma) -> Self {
        KernelSpec {
            kind: KernelKind::ChiSquare,
            gamma,
            c: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.c.is_finite() && self.c > 0.0) {
            return Err(Error::InvalidParams(format!("c must be > 0, got {}", self.c)));
        }
        if let Gamma::Fixed(g) = self.gamma {
            if !(g.is_finite() && g > 0.0) {
                return Err(Error::InvalidParams(format!("gamma must be > 0, got {g}")));
            }
        }
        Ok(())
    }
}

/// Chi-square distance sum_i (a_i - b_i)^2 / (a_i + b_i + eps).
pub fn chi_square_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(&x, &y)| {
            let d = x - y;
            d * d / (x + y + CHI_SQUARE_EPS)
        })
        .sum()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn kernel_resolved(kind: KernelKind, gamma: f64, a: &[f64], b: &[f64]) -> f64 {
    match kind {
        KernelKind::Linear => dot(a, b),
        KernelKind::ChiSquare => (-gamma * chi_square_distance(a, b)).exp(),
    }
}

/// Kernel value between two equal-length vectors. The chi-square kernel
/// needs non-negative inputs and a resolved (fixed) gamma.
pub fn kernel_value(a: &[f64], b: &[f64], k: &KernelSpec) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    match k.kind {
        KernelKind::Linear => Ok(dot(a, b)),
        KernelKind::ChiSquare => {
            if let Some(&v) = a.iter().chain(b).find(|&&v| v < 0.0) {
                return Err(Error::NegativeFeature(v));
            }
            let gamma = match k.gamma {
                Gamma::Fixed(g) => g,
                Gamma::Auto => {
                    return Err(Error::InvalidParams(
                        "gamma \"auto\" resolves at training time; kernel_value needs a fixed gamma"
                            .into(),
                    ))
                }
            };
            Ok(kernel_resolved(KernelKind::ChiSquare, gamma, a, b))
        }
    }
}

/// Recognition-rate delta of an augmented feature over its baseline.
pub fn relative_rr(rr_sdg: f64, rr_top: f64) -> f64 {
    debug_assert!((0.0..=1.0).contains(&rr_sdg) && (0.0..=1.0).contains(&rr_top));
    rr_sdg - rr_top
}

#[derive(Debug, Clone)]
struct BinaryMachine {
    /// Votes for this class when the decision value is >= 0.
    class_pos: usize,
    class_neg: usize,
    sv_index: Vec<usize>,
    /// alpha_i * y_i per support vector.
    coef: Vec<f64>,
    b: f64,
}

/// A trained one-vs-one multiclass SVM.
#[derive(Debug, Clone)]
pub struct SvmModel {
    classes: Vec<String>,
    kind: KernelKind,
    gamma: f64,
    machines: Vec<BinaryMachine>,
    vectors: Vec<Vec<f64>>,
}

impl SvmModel {
    pub fn classes(&self) -> &[String] {
        &self.classes
    }

    pub fn machine_count(&self) -> usize {
        self.machines.len()
    }

    pub fn resolved_gamma(&self) -> f64 {
        self.gamma
    }

    /// Predicted class index by majority vote; ties go to the lowest
    /// class index.
    pub fn predict_index(&self, x: &[f64]) -> usize {
        let k_row: Vec<f64> = self
            .vectors
            .iter()
            .map(|sv| kernel_resolved(self.kind, self.gamma, sv, x))
            .collect();
        let mut votes = vec![0usize; self.classes.len()];
        for m in &self.machines {
            let decision: f64 = m
                .sv_index
                .iter()
                .zip(&m.coef)
                .map(|(&i, &c)| c * k_row[i])
                .sum::<f64>()
                + m.b;
            let winner = if decision >= 0.0 { m.class_pos } else { m.class_neg };
            votes[winner] += 1;
        }
        votes
            .iter()
            .enumerate()
            .max_by(|(ia, va), (ib, vb)| va.cmp(vb).then(ib.cmp(ia)))
            .map(|(i, _)| i)
            .expect("at least one class")
    }

    pub fn predict(&self, x: &[f64]) -> &str {
        &self.classes[self.predict_index(x)]
    }
}

fn sorted_unique(items: &[String]) -> Vec<String> {
    let mut out: Vec<String> = items.to_vec();
    out.sort_unstable();
    out.dedup();
    out
}

fn resolve_gamma(kind: KernelKind, gamma: Gamma, features: &[Vec<f64>]) -> f64 {
    match (kind, gamma) {
        (KernelKind::Linear, _) => 1.0,
        (_, Gamma::Fixed(g)) => g,
        (KernelKind::ChiSquare, Gamma::Auto) => {
            let n = features.len();
            let mut sum = 0.0;
            let mut pairs = 0usize;
            for i in 0..n {
                for j in (i + 1)..n {
                    sum += chi_square_distance(&features[i], &features[j]);
                    pairs += 1;
                }
            }
            let mean = if pairs > 0 { sum / pairs as f64 } else { 0.0 };
            if mean > CHI_SQUARE_EPS {
                1.0 / mean
            } else {
                1.0
            }
        }
    }
}

/// Train a one-vs-one multiclass SVM.
///
/// Deterministic for a fixed sample order; class identity comes from
/// sorted label names, so reordering samples cannot relabel classes.
pub fn train(features: &[Vec<f64>], labels: &[String], k: &KernelSpec) -> Result<SvmModel> {
    k.validate()?;
    assert_eq!(features.len(), labels.len(), "one label per sample");
    if features.is_empty() {
        return Err(Error::InvalidParams("empty training set".into()));
    }
    let dim = features[0].len();
    for (i, f) in features.iter().enumerate() {
        if f.len() != dim {
            return Err(Error::DimensionMismatch {
                left: dim,
                right: f.len(),
            });
        }
        if f.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFiniteFeature(i));
        }
        if k.kind == KernelKind::ChiSquare {
            if let Some(&v) = f.iter().find(|&&v| v < 0.0) {
                return Err(Error::NegativeFeature(v));
            }
        }
    }
    let classes = sorted_unique(labels);
    if classes.len() < 2 {
        return Err(Error::SingleClass(classes[0].clone()));
    }
    let class_of: Vec<usize> = labels
        .iter()
        .map(|l| classes.binary_search(l).expect("label in class list"))
        .collect();

    let gamma = resolve_gamma(k.kind, k.gamma, features);

    let n = features.len();
    let mut gram = vec![0.0f64; n * n];
    for i in 0..n {
        for j in i..n {
            let v = kernel_resolved(k.kind, gamma, &features[i], &features[j]);
            gram[i * n + j] = v;
            gram[j * n + i] = v;
        }
    }

    let mut machines = Vec::with_capacity(classes.len() * (classes.len() - 1) / 2);
    for a in 0..classes.len() {
        for b in (a + 1)..classes.len() {
            let idx: Vec<usize> = (0..n)
                .filter(|&i| class_of[i] == a || class_of[i] == b)
                .collect();
            let y: Vec<f64> = idx
                .iter()
                .map(|&i| if class_of[i] == a { 1.0 } else { -1.0 })
                .collect();
            let sub_gram = |p: usize, q: usize| gram[idx[p] * n + idx[q]];
            let sol = solve(&SmoProblem {
                gram: &sub_gram,
                y: &y,
                c: k.c,
                tol: KKT_TOLERANCE,
                max_steps: MAX_SMO_STEPS,
            });
            let mut sv_index = Vec::new();
            let mut coef = Vec::new();
            for (p, &alpha) in sol.alphas.iter().enumerate() {
                if alpha > 1e-12 {
                    sv_index.push(idx[p]);
                    coef.push(alpha * y[p]);
                }
            }
            machines.push(BinaryMachine {
                class_pos: a,
                class_neg: b,
                sv_index,
                coef,
                b: sol.b,
            });
        }
    }

    Ok(SvmModel {
        classes,
        kind: k.kind,
        gamma,
        machines,
        vectors: features.to_vec(),
    })
}

/// One dataset sample set for LOSO evaluation.
#[derive(Debug, Clone, Default)]
pub struct Dataset {
    pub features: Vec<Vec<f64>>,
    pub labels: Vec<String>,
    pub subjects: Vec<String>,
}

impl Dataset {
    pub fn push(&mut self, features: Vec<f64>, label: impl Into<String>, subject: impl Into<String>) {
        self.features.push(features);
        self.labels.push(label.into());
        self.subjects.push(subject.into());
    }

    pub fn len(&self) -> usize {
        self.features.len()
    }

    pub fn is_empty(&self) -> bool {
        self.features.is_empty()
    }
}

/// Leave-one-subject-out splits, one per distinct subject in sorted
/// order: (held-out subject, train indices, test indices).
pub fn loso_folds(subjects: &[String]) -> Vec<(String, Vec<usize>, Vec<usize>)> {
    sorted_unique(subjects)
        .into_iter()
        .map(|held| {
            let (mut train, mut test) = (Vec::new(), Vec::new());
            for (i, s) in subjects.iter().enumerate() {
                if *s == held {
                    test.push(i);
                } else {
                    train.push(i);
                }
            }
            (held, train, test)
        })
        .collect()
}

#[derive(Debug, Clone, Copy, Default)]
pub struct LosoOptions {
    /// Skip (and report) folds whose training complement collapses to a
    /// single class instead of failing the whole evaluation.
    pub skip_degenerate_folds: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FoldResult {
    pub held_out_subject: String,
    /// (true label, predicted label) per held-out sample.
    pub per_sample: Vec<(String, String)>,
    pub fold_accuracy: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EvalReport {
    /// Pooled accuracy over all evaluated samples.
    pub overall_rr: f64,
    /// Mean of per-fold accuracies.
    pub macro_rr: f64,
    pub labels: Vec<String>,
    /// Rows = true class, columns = predicted class.
    pub confusion: Vec<Vec<u64>>,
    pub folds: Vec<FoldResult>,
    pub skipped_subjects: Vec<String>,
}

impl EvalReport {
    pub fn total_samples(&self) -> u64 {
        self.confusion.iter().flatten().sum()
    }
}

/// Evaluate a dataset under LOSO with the given kernel.
pub fn loso_evaluate(ds: &Dataset, k: &KernelSpec, opts: &LosoOptions) -> Result<EvalReport> {
    assert_eq!(ds.features.len(), ds.labels.len());
    assert_eq!(ds.features.len(), ds.subjects.len());
    let subjects = sorted_unique(&ds.subjects);
    if subjects.len() < 2 {
        return Err(Error::TooFewSubjects(subjects.len()));
    }
    let labels = sorted_unique(&ds.labels);
    let folds = loso_folds(&ds.subjects);

    enum FoldOutcome {
        Skipped(String),
        Done(FoldResult),
    }

    let outcomes: Vec<Result<FoldOutcome>> = folds
        .par_iter()
        .map(|(held, train_idx, test_idx)| {
            let train_features: Vec<Vec<f64>> =
                train_idx.iter().map(|&i| ds.features[i].clone()).collect();
            let train_labels: Vec<String> =
                train_idx.iter().map(|&i| ds.labels[i].clone()).collect();
            // Subject isolation is a hard invariant, not a test detail.
            for &i in train_idx {
                assert_ne!(&ds.subjects[i], held, "subject leaked into training fold");
            }
            for &i in test_idx {
                assert_eq!(&ds.subjects[i], held, "foreign sample in test fold");
            }
            if sorted_unique(&train_labels).len() < 2 {
                if opts.skip_degenerate_folds {
                    return Ok(FoldOutcome::Skipped(held.clone()));
                }
                return Err(Error::DegenerateFold(held.clone()));
            }
            let model = train(&train_features, &train_labels, k)?;
            let mut per_sample = Vec::with_capacity(test_idx.len());
            let mut correct = 0usize;
            for &i in test_idx {
                let predicted = model.predict(&ds.features[i]).to_string();
                if predicted == ds.labels[i] {
                    correct += 1;
                }
                per_sample.push((ds.labels[i].clone(), predicted));
            }
            Ok(FoldOutcome::Done(FoldResult {
                held_out_subject: held.clone(),
                fold_accuracy: correct as f64 / test_idx.len().max(1) as f64,
                per_sample,
            }))
        })
        .collect();

    let mut fold_results = Vec::new();
    let mut skipped = Vec::new();
    for outcome in outcomes {
        match outcome? {
            FoldOutcome::Skipped(s) => skipped.push(s),
            FoldOutcome::Done(f) => fold_results.push(f),
        }
    }

    let class_index = |l: &str| labels.iter().position(|x| x == l).expect("known label");
    let mut confusion = vec![vec![0u64; labels.len()]; labels.len()];
    for fold in &fold_results {
        for (truth, predicted) in &fold.per_sample {
            confusion[class_index(truth)][class_index(predicted)] += 1;
        }
    }
    let total: u64 = confusion.iter().flatten().sum();
    let trace: u64 = (0..labels.len()).map(|i| confusion[i][i]).sum();
    let overall_rr = if total > 0 {
        trace as f64 / total as f64
    } else {
        0.0
    };
    let macro_rr = if fold_results.is_empty() {
        0.0
    } else {
        fold_results.iter().map(|f| f.fold_accuracy).sum::<f64>() / fold_results.len() as f64
    };

    Ok(EvalReport {
        overall_rr,
        macro_rr,
        labels,
        confusion,
        folds: fold_results,
        skipped_subjects: skipped,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec_linear() -> KernelSpec {
        KernelSpec::linear()
    }

    #[test]
    fn kernel_examples() {
        let a = vec![1.0, 2.0];
        assert_eq!(kernel_value(&a, &a, &spec_linear()).unwrap(), 5.0);

        let k = KernelSpec::chi_square(Gamma::Fixed(1.0));
        let same = kernel_value(&a, &a, &k).unwrap();
        assert_eq!(same, 1.0);

        let x = vec![1.0, 0.0];
        let y = vec![0.0, 1.0];
        let got = kernel_value(&x, &y, &k).unwrap();
        let expect = (-2.0f64).exp();
        assert!((got - expect).abs() < 1e-9, "{got} vs {expect}");
    }

    #[test]
    fn kernel_error_paths() {
        let k = KernelSpec::chi_square(Gamma::Fixed(1.0));
        assert!(matches!(
            kernel_value(&[1.0], &[1.0, 2.0], &k),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(matches!(
            kernel_value(&[-1.0], &[1.0], &k),
            Err(Error::NegativeFeature(_))
        ));
        let auto = KernelSpec::chi_square(Gamma::Auto);
        assert!(kernel_value(&[1.0], &[1.0], &auto).is_err());
    }

    #[test]
    fn kernel_symmetry_and_psd_spot_check() {
        let vectors: Vec<Vec<f64>> = (0..6)
            .map(|i| (0..4).map(|j| ((i * 7 + j * 3) % 5) as f64).collect())
            .collect();
        for k in [spec_linear(), KernelSpec::chi_square(Gamma::Fixed(0.7))] {
            let n = vectors.len();
            let mut gram = vec![vec![0.0; n]; n];
            for i in 0..n {
                for j in 0..n {
                    gram[i][j] = kernel_value(&vectors[i], &vectors[j], &k).unwrap();
                }
            }
            for i in 0..n {
                for j in 0..n {
                    assert!((gram[i][j] - gram[j][i]).abs() < 1e-12);
                }
            }
            // Gershgorin-free check: x^T G x >= -1e-8 for a few vectors.
            for probe in 0..4u64 {
                let x: Vec<f64> = (0..n).map(|i| (((i as u64 + probe) % 3) as f64) - 1.0).collect();
                let mut q = 0.0;
                for i in 0..n {
                    for j in 0..n {
                        q += x[i] * gram[i][j] * x[j];
                    }
                }
                assert!(q >= -1e-8, "quadratic form {q}");
            }
        }
    }

    #[test]
    fn relative_rr_examples() {
        assert!((relative_rr(0.6968, 0.6480) - 0.0488).abs() < 1e-12);
        assert_eq!(relative_rr(0.5, 0.5), 0.0);
        assert_eq!(relative_rr(0.0, 1.0), -1.0);
    }

    fn blob_dataset() -> (Vec<Vec<f64>>, Vec<String>) {
        // Two well-separated clusters in 2-D.
        let mut features = Vec::new();
        let mut labels = Vec::new();
        for i in 0..10 {
            let jitter = (i as f64) * 0.05;
            features.push(vec![jitter, 0.5 - jitter]);
            labels.push("low".to_string());
            features.push(vec![6.0 + jitter, 5.5 - jitter]);
            labels.push("high".to_string());
        }
        (features, labels)
    }

    #[test]
    fn separable_blobs_reach_full_training_accuracy() {
        let (features, labels) = blob_dataset();
        let model = train(&features, &labels, &spec_linear()).unwrap();
        let correct = features
            .iter()
            .zip(&labels)
            .filter(|(f, l)| model.predict(f) == l.as_str())
            .count();
        assert_eq!(correct, features.len());
    }

    #[test]
    fn three_class_one_vs_one_builds_three_machines() {
        let features = vec![
            vec![0.0, 0.0],
            vec![0.1, 0.0],
            vec![5.0, 0.0],
            vec![5.1, 0.0],
            vec![0.0, 5.0],
            vec![0.1, 5.0],
        ];
        let labels: Vec<String> = ["a", "a", "b", "b", "c", "c"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        let model = train(&features, &labels, &spec_linear()).unwrap();
        assert_eq!(model.machine_count(), 3);
        assert_eq!(model.classes(), ["a", "b", "c"]);
    }

    #[test]
    fn training_is_deterministic() {
        let (features, labels) = blob_dataset();
        let m1 = train(&features, &labels, &spec_linear()).unwrap();
        let m2 = train(&features, &labels, &spec_linear()).unwrap();
        for f in &features {
            assert_eq!(m1.predict(f), m2.predict(f));
        }
    }

    #[test]
    fn predictions_survive_training_permutations() {
        let (features, labels) = blob_dataset();
        let baseline = train(&features, &labels, &spec_linear()).unwrap();
        let probes: Vec<Vec<f64>> = vec![vec![0.2, 0.1], vec![5.8, 5.2], vec![3.4, 2.0]];
        let base_preds: Vec<&str> = probes.iter().map(|p| baseline.predict(p)).collect();
        for rotation in [3usize, 7, 11] {
            let order: Vec<usize> = (0..features.len())
                .map(|i| (i * rotation + 1) % features.len())
                .collect();
            let f2: Vec<Vec<f64>> = order.iter().map(|&i| features[i].clone()).collect();
            let l2: Vec<String> = order.iter().map(|&i| labels[i].clone()).collect();
            let m2 = train(&f2, &l2, &spec_linear()).unwrap();
            let preds: Vec<&str> = probes.iter().map(|p| m2.predict(p)).collect();
            assert_eq!(preds, base_preds, "rotation {rotation}");
        }
    }

    #[test]
    fn single_class_training_fails() {
        let features = vec![vec![1.0], vec![2.0]];
        let labels = vec!["x".to_string(), "x".to_string()];
        assert!(matches!(
            train(&features, &labels, &spec_linear()),
            Err(Error::SingleClass(_))
        ));
    }

    #[test]
    fn non_finite_features_fail() {
        let features = vec![vec![1.0], vec![f64::NAN]];
        let labels = vec!["x".to_string(), "y".to_string()];
        assert!(matches!(
            train(&features, &labels, &spec_linear()),
            Err(Error::NonFiniteFeature(1))
        ));
    }

    fn one_hot_dataset(subject_count: usize) -> Dataset {
        let mut ds = Dataset::default();
        for s in 0..subject_count {
            for class in 0..3usize {
                let mut f = vec![0.0; 3];
                f[class] = 1.0;
                ds.push(f, format!("c{class}"), format!("s{s:02}"));
            }
        }
        ds
    }

    #[test]
    fn loso_fold_count_equals_subject_count() {
        let ds = one_hot_dataset(26);
        let folds = loso_folds(&ds.subjects);
        assert_eq!(folds.len(), 26);
        for (held, train, test) in &folds {
            assert!(test.iter().all(|&i| &ds.subjects[i] == held));
            assert!(train.iter().all(|&i| &ds.subjects[i] != held));
            assert_eq!(train.len() + test.len(), ds.len());
        }
    }

    #[test]
    fn one_hot_features_reach_perfect_rr() {
        let ds = one_hot_dataset(5);
        let report = loso_evaluate(&ds, &spec_linear(), &LosoOptions::default()).unwrap();
        assert_eq!(report.folds.len(), 5);
        assert_eq!(report.overall_rr, 1.0);
        assert_eq!(report.macro_rr, 1.0);
        let trace: u64 = (0..3).map(|i| report.confusion[i][i]).sum();
        assert_eq!(trace, report.total_samples());
    }

    #[test]
    fn confusion_rows_match_class_counts() {
        let ds = one_hot_dataset(4);
        let report = loso_evaluate(&ds, &spec_linear(), &LosoOptions::default()).unwrap();
        for (i, row) in report.confusion.iter().enumerate() {
            let row_sum: u64 = row.iter().sum();
            let class_count = ds
                .labels
                .iter()
                .filter(|l| **l == report.labels[i])
                .count() as u64;
            assert_eq!(row_sum, class_count);
        }
    }

    #[test]
    fn degenerate_fold_is_error_or_skipped() {
        let mut ds = Dataset::default();
        // Subject s0 holds every "b" sample; its complement is single-class.
        ds.push(vec![0.0, 1.0], "b", "s0");
        ds.push(vec![0.1, 1.0], "b", "s0");
        ds.push(vec![1.0, 0.0], "a", "s1");
        ds.push(vec![1.1, 0.0], "a", "s2");
        assert!(matches!(
            loso_evaluate(&ds, &spec_linear(), &LosoOptions::default()),
            Err(Error::DegenerateFold(_))
        ));
        let report = loso_evaluate(
            &ds,
            &spec_linear(),
            &LosoOptions {
                skip_degenerate_folds: true,
            },
        )
        .unwrap();
        assert_eq!(report.skipped_subjects, vec!["s0".to_string()]);
        assert_eq!(report.folds.len(), 2);
    }

    #[test]
    fn single_subject_dataset_is_rejected() {
        let mut ds = Dataset::default();
        ds.push(vec![1.0], "a", "only");
        ds.push(vec![0.0], "b", "only");
        assert!(matches!(
            loso_evaluate(&ds, &spec_linear(), &LosoOptions::default()),
            Err(Error::TooFewSubjects(1))
        ));
    }

    #[test]
    fn chi_square_auto_gamma_resolves_from_training_data() {
        let (features, labels) = blob_dataset();
        let model = train(&features, &labels, &KernelSpec::chi_square(Gamma::Auto)).unwrap();
        assert!(model.resolved_gamma() > 0.0);
        let correct = features
            .iter()
            .zip(&labels)
            .filter(|(f, l)| model.predict(f) == l.as_str())
            .count();
        assert!(correct >= features.len() - 1, "{correct}/{}", features.len());
    }
}
