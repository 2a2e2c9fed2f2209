//! Python module `pak`.

use pak_core::coleman::{global_double_index, MeromorphicForm};
use pak_core::cube::{dd_n, random_samples, AbelianModel, GroupFunction, MPoly};
use pak_core::curvature::check_identities;
use pak_core::forms::parse_form;
use pak_core::green::{random_element, synthetic_formula_case, FormulaCase};
use pak_core::laurent::{double_index as local_double_index, A1Element, LaurentTrunc, MIN_OVERLAP};
use pak_core::ledger::{codifferent_and_chi, rr_rescale_invariance, validate_character, IdeleCharacter, RescaleState};
use pak_core::padic::serial::element_to_json;
use pak_core::padic::{assert_equal, parse_scalar, LocalField, LogBranch, PadicElement, PrimeConfig};
use pak_core::qpoly::Q;
use pak_core::Error;
use pyo3::exceptions::{PyArithmeticError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyString;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

fn err(e: Error) -> PyErr {
    match e {
        Error::PrecisionExhausted(_) | Error::WindowUnderflow(_) => PyArithmeticError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn qp(p: u32, precision: u32) -> PyResult<LocalField> {
    Ok(LocalField::qp(PrimeConfig::new(p, precision).map_err(err)?))
}

fn branch(field: &LocalField, token: &str) -> PyResult<LogBranch> {
    let lambda = parse_scalar(field, token, &LogBranch::iwasawa(field)).map_err(err)?;
    Ok(LogBranch::new(lambda))
}

fn to_py(py: Python<'_>, v: &Value) -> PyResult<Py<PyAny>> {
    Ok(py.import("json")?.call_method1("loads", (v.to_string(),))?.unbind())
}

fn el(x: &PadicElement) -> Value {
    let mut v = element_to_json(x);
    if let Some(r) = x.to_small_rational(1_000_000) {
        v["approx"] = json!(r.to_string());
    }
    v
}

/// `Q_p` at a fixed relative precision.
#[pyclass(frozen)]
struct Field {
    inner: LocalField,
}

#[pymethods]
impl Field {
    #[new]
    #[pyo3(signature = (p, precision = 32))]
    fn new(p: u32, precision: u32) -> PyResult<Self> {
        Ok(Field { inner: qp(p, precision)? })
    }

    #[getter]
    fn p(&self) -> u32 {
        self.inner.p()
    }

    #[getter]
    fn precision(&self) -> u32 {
        self.inner.prec()
    }

    fn int(&self, n: i64) -> Padic {
        Padic {
            inner: self.inner.from_int(n),
        }
    }

    fn ratio(&self, num: i64, den: i64) -> PyResult<Padic> {
        if den == 0 {
            return Err(err(Error::DivisionByZero));
        }
        Ok(Padic {
            inner: self.inner.from_ratio_i64(num, den),
        })
    }

    /// Sums of rationals and `r*log(s)` terms, e.g. `"1/2 - 3*log(2)"`.
    #[pyo3(signature = (token, log_branch = "0"))]
    fn scalar(&self, token: &str, log_branch: &str) -> PyResult<Padic> {
        let br = branch(&self.inner, log_branch)?;
        Ok(Padic {
            inner: parse_scalar(&self.inner, token, &br).map_err(err)?,
        })
    }

    fn __repr__(&self) -> String {
        format!("Field(p={}, precision={})", self.inner.p(), self.inner.prec())
    }
}

#[pyclass(frozen)]
struct Padic {
    inner: PadicElement,
}

#[pymethods]
impl Padic {
    fn __add__(&self, o: &Padic) -> Padic {
        Padic {
            inner: &self.inner + &o.inner,
        }
    }

    fn __sub__(&self, o: &Padic) -> Padic {
        Padic {
            inner: &self.inner - &o.inner,
        }
    }

    fn __mul__(&self, o: &Padic) -> Padic {
        Padic {
            inner: &self.inner * &o.inner,
        }
    }

    fn __truediv__(&self, o: &Padic) -> PyResult<Padic> {
        Ok(Padic {
            inner: self.inner.try_div(&o.inner).map_err(err)?,
        })
    }

    fn __neg__(&self) -> Padic {
        Padic {
            inner: -self.inner.clone(),
        }
    }

    /// Valuation in units of the uniformizer; `None` for zero.
    fn valuation(&self) -> Option<i64> {
        self.inner.valuation_pi()
    }

    fn is_zero(&self) -> bool {
        self.inner.is_zero()
    }

    #[pyo3(signature = (log_branch = "0"))]
    fn log(&self, log_branch: &str) -> PyResult<Padic> {
        let br = branch(self.inner.field(), log_branch)?;
        Ok(Padic {
            inner: self.inner.log(&br).map_err(err)?,
        })
    }

    /// Agreement to `target` digits above the smaller valuation.
    fn eq_to(&self, o: &Padic, target: i64) -> bool {
        assert_equal(&self.inner, &o.inner, target)
    }

    /// A rational with numerator and denominator below 10^6 matching the
    /// element to its precision, if there is one.
    fn approx(&self) -> Option<String> {
        self.inner.to_small_rational(1_000_000).map(|r| r.to_string())
    }

    fn to_json(&self, py: Python<'_>) -> PyResult<Py<PyAny>> {
        to_py(py, &element_to_json(&self.inner))
    }

    fn __repr__(&self) -> String {
        format!("Padic({})", self.inner.describe())
    }
}

/// Double index of `f + a log z` and `g + b log z` for Laurent polynomials
/// `f`, `g`; each argument is `(low, [integer coefficients from z^low], a)`.
#[pyfunction]
#[pyo3(signature = (p, f, g, precision = 32))]
fn laurent_double_index(p: u32, f: (i64, Vec<i64>, i64), g: (i64, Vec<i64>, i64), precision: u32) -> PyResult<Padic> {
    let k = qp(p, precision)?;
    let high = [&f, &g].iter().map(|(low, c, _)| low + c.len() as i64).max().unwrap().max(0) + MIN_OVERLAP + 8;
    let mk = |(low, c, a): &(i64, Vec<i64>, i64)| {
        let mut c = c.clone();
        c.resize((high - low).max(0) as usize, 0);
        A1Element::new(LaurentTrunc::from_ints(&k, *low, &c, high), k.from_int(*a))
    };
    Ok(Padic {
        inner: local_double_index(&mk(&f), &mk(&g)).map_err(err)?,
    })
}

/// Global double index on `P^1` of two forms in the form language.
#[pyfunction]
#[pyo3(signature = (p, f, g, precision = 32, log_branch = "0"))]
fn double_index(py: Python<'_>, p: u32, f: &str, g: &str, precision: u32, log_branch: &str) -> PyResult<Py<PyAny>> {
    let k = qp(p, precision)?;
    let br = branch(&k, log_branch)?;
    let form = |s: &str| -> PyResult<MeromorphicForm> {
        let r = parse_form(s).map_err(err)?;
        MeromorphicForm::from_q(&k, &r.num, &r.den).map_err(err)
    };
    let gi = global_double_index(&form(f)?, &form(g)?, &br).map_err(err)?;
    let points: Vec<Value> = gi
        .locals
        .iter()
        .map(|(x, v)| json!({ "point": x.to_string(), "local_index": el(v) }))
        .collect();
    let v = json!({
        "points": points,
        "global": el(&gi.total),
        "vanishes": gi.vanishes(precision as i64 - 4),
    });
    to_py(py, &v)
}

#[pyfunction]
fn curvature_identities(py: Python<'_>, genus: usize) -> PyResult<Py<PyAny>> {
    let r = check_identities(genus).map_err(err)?;
    to_py(
        py,
        &json!({
            "diagonal_pullback": r.diagonal,
            "section_pullback": r.section,
            "cup_is_diagonal_class": r.cup_is_diagonal,
        }),
    )
}

/// Synthetic Green table with the data for the Green formula.
#[pyfunction]
#[pyo3(signature = (p, genus, seed = 0, precision = 32))]
fn green_formula_case(py: Python<'_>, p: u32, genus: u32, seed: u64, precision: u32) -> PyResult<Py<PyAny>> {
    let k = qp(p, precision)?;
    let case = synthetic_formula_case(&k, genus, &mut ChaCha8Rng::seed_from_u64(seed)).map_err(err)?;
    to_py(py, &case.to_json())
}

/// Recovers `G(P,Q)` through the Green formula; `case` is a dict or a JSON string.
#[pyfunction]
#[pyo3(signature = (p, case, precision = 32))]
fn green_check_formula(py: Python<'_>, p: u32, case: &Bound<'_, PyAny>, precision: u32) -> PyResult<bool> {
    let text: String = if case.is_instance_of::<PyString>() {
        case.extract()?
    } else {
        py.import("json")?.call_method1("dumps", (case,))?.extract()?
    };
    let v: Value = serde_json::from_str(&text).map_err(|e| PyValueError::new_err(e.to_string()))?;
    let k = qp(p, precision)?;
    let c = FormulaCase::from_json(&k, &v).map_err(err)?;
    let got = c.evaluate().map_err(err)?;
    Ok(assert_equal(&got, &c.expected().map_err(err)?, precision as i64 - 4))
}

/// Product-formula check for a character given as TOML text.
#[pyfunction]
#[pyo3(signature = (toml_text, generators, precision = 32))]
fn validate_character_toml(py: Python<'_>, toml_text: &str, generators: Vec<String>, precision: u32) -> PyResult<Py<PyAny>> {
    let ell = IdeleCharacter::from_toml(toml_text, precision).map_err(err)?;
    let gens: Vec<Q> = generators
        .iter()
        .map(|s| s.trim().parse::<Q>().map_err(|_| PyValueError::new_err(format!("bad generator {s:?}"))))
        .collect::<PyResult<_>>()?;
    to_py(py, &validate_character(&ell, &gens).map_err(err)?.to_json())
}

/// `ΔLHS`, `ΔRHS` under `G ↦ G + c` on a seeded synthetic state.
#[pyfunction]
#[pyo3(signature = (p, c, degree, genus, seed = 0, precision = 32))]
fn rr_rescale(py: Python<'_>, p: u32, c: &str, degree: i64, genus: u32, seed: u64, precision: u32) -> PyResult<Py<PyAny>> {
    let k = qp(p, precision)?;
    let c = parse_scalar(&k, c, &LogBranch::iwasawa(&k)).map_err(err)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let st = RescaleState {
        field: k.clone(),
        place: "p".into(),
        ll: random_element(&k, &mut rng),
        lw: random_element(&k, &mut rng),
        ww: random_element(&k, &mut rng),
    };
    let r = rr_rescale_invariance(&st, "p", &c, degree, genus).map_err(err)?;
    let mut v = r.to_json();
    v["equal"] = json!(assert_equal(&r.delta_lhs, &r.delta_rhs, precision as i64 - 4));
    to_py(py, &v)
}

/// Codifferent degree and chi of Z for Q(sqrt d) under the standard character.
#[pyfunction]
#[pyo3(signature = (p, d, precision = 32))]
fn codifferent(py: Python<'_>, p: u32, d: i64, precision: u32) -> PyResult<Py<PyAny>> {
    let k = qp(p, precision)?;
    let primes: Vec<u64> = (2..200u64).filter(|n| (2..*n).take_while(|j| j * j <= *n).all(|j| n % j != 0)).collect();
    let ell = IdeleCharacter::standard(&k, &primes).map_err(err)?;
    let r = codifferent_and_chi(d, &ell).map_err(err)?;
    let mut v = r.to_json();
    v["consistent"] = json!(r.consistent());
    to_py(py, &v)
}

/// Whether `D^n` kills every monomial of the given degree on `Z^rank`.
#[pyfunction]
#[pyo3(signature = (n, degree, rank = 2, samples = 16, seed = 0))]
fn cube_annihilates(n: usize, degree: u32, rank: usize, samples: usize, seed: u64) -> PyResult<bool> {
    if n == 0 || rank == 0 {
        return Err(PyValueError::new_err("n and rank must be positive"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pts = random_samples(AbelianModel { rank }, n, samples, &mut rng);
    let zero = Q::from_integer(0.into());
    Ok(MPoly::exponents(rank, degree).iter().all(|e| {
        let f = GroupFunction::polynomial(MPoly::monomial(e, Q::from_integer(1.into())));
        pts.iter().all(|(x, h)| dd_n(&f, x, h) == zero)
    }))
}

#[pymodule]
fn pak(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Field>()?;
    m.add_class::<Padic>()?;
    m.add_function(wrap_pyfunction!(laurent_double_index, m)?)?;
    m.add_function(wrap_pyfunction!(double_index, m)?)?;
    m.add_function(wrap_pyfunction!(curvature_identities, m)?)?;
    m.add_function(wrap_pyfunction!(green_formula_case, m)?)?;
    m.add_function(wrap_pyfunction!(green_check_formula, m)?)?;
    m.add_function(wrap_pyfunction!(validate_character_toml, m)?)?;
    m.add_function(wrap_pyfunction!(rr_rescale, m)?)?;
    m.add_function(wrap_pyfunction!(codifferent, m)?)?;
    m.add_function(wrap_pyfunction!(cube_annihilates, m)?)?;
    Ok(())
}
