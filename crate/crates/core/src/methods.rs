//! Built-in methods: the fourth- and fifth-order IMEX-DIMSIM pairs, the
//! first-order IMEX-Euler pair, and additive Runge-Kutta comparators read
//! from coefficient files.

use std::fs;
use std::path::Path;
use std::sync::OnceLock;

use nalgebra::{DMatrix, DVector};
use serde_json::{json, Value};

use crate::glm::io::{mat_value, parse_mat, parse_vec, vec_value};
use crate::glm::{GlmError, ImexGlmMethod};

/// Tolerance for the shared-abscissa check of additive Runge-Kutta files.
pub const ABSCISSA_TOL: f64 = 1e-12;

fn mat<const R: usize, const C: usize>(rows: &[[f64; C]; R]) -> DMatrix<f64> {
    DMatrix::from_fn(R, C, |i, j| rows[i][j])
}

/// IMEX-DIMSIM4: `p = q = r = s = 4`, `c = [0, 1/3, 2/3, 1]`, L-stable
/// implicit part with diagonal `0.572816062482135`.
pub fn builtin_imex_dimsim4() -> ImexGlmMethod {
    static M: OnceLock<ImexGlmMethod> = OnceLock::new();
    M.get_or_init(|| {
        ImexGlmMethod::dimsim(
            "dimsim4",
            4,
            4,
            DVector::from_vec(vec![0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0]),
            mat(&DIMSIM4_A),
            mat(&DIMSIM4_AHAT),
            mat(&DIMSIM4_B),
            mat(&DIMSIM4_BHAT),
            DVector::from_row_slice(&DIMSIM4_V),
            mat(&DIMSIM4_Q),
            mat(&DIMSIM4_QHAT),
        )
        .expect("IMEX-DIMSIM4 table shapes")
    })
    .clone()
}

/// IMEX-DIMSIM5: `p = q = r = s = 5`, `c = [0, 1/4, 1/2, 3/4, 1]`, L-stable
/// implicit part with diagonal `0.278053841136452`.
pub fn builtin_imex_dimsim5() -> ImexGlmMethod {
    static M: OnceLock<ImexGlmMethod> = OnceLock::new();
    M.get_or_init(|| {
        ImexGlmMethod::dimsim(
            "dimsim5",
            5,
            5,
            DVector::from_vec(vec![0.0, 0.25, 0.5, 0.75, 1.0]),
            mat(&DIMSIM5_A),
            mat(&DIMSIM5_AHAT),
            mat(&DIMSIM5_B),
            mat(&DIMSIM5_BHAT),
            DVector::from_row_slice(&DIMSIM5_V),
            mat(&DIMSIM5_Q),
            mat(&DIMSIM5_QHAT),
        )
        .expect("IMEX-DIMSIM5 table shapes")
    })
    .clone()
}

/// Forward Euler on the nonstiff part, backward Euler on the stiff part, as a
/// one-stage, one-external-value GLM.
pub fn builtin_imex_euler() -> ImexGlmMethod {
    let one = || DMatrix::from_element(1, 1, 1.0);
    ImexGlmMethod::dimsim(
        "imex-euler",
        1,
        1,
        DVector::from_vec(vec![0.0]),
        DMatrix::zeros(1, 1),
        one(),
        one(),
        one(),
        DVector::from_vec(vec![1.0]),
        DMatrix::from_row_slice(1, 2, &[1.0, 0.0]),
        DMatrix::from_row_slice(1, 2, &[1.0, -1.0]),
    )
    .expect("IMEX-Euler shapes")
}

/// Looks up a built-in method by its CLI name.
pub fn builtin_by_name(name: &str) -> Option<ImexGlmMethod> {
    match name {
        "dimsim4" => Some(builtin_imex_dimsim4()),
        "dimsim5" => Some(builtin_imex_dimsim5()),
        "imex-euler" => Some(builtin_imex_euler()),
        _ => None,
    }
}

/// An additive Runge-Kutta pair: strictly lower-triangular explicit tableau
/// and diagonally implicit tableau with shared abscissae.
#[derive(Debug, Clone, PartialEq)]
pub struct ImexRkMethod {
    name: String,
    c: DVector<f64>,
    a_explicit: DMatrix<f64>,
    b_explicit: DVector<f64>,
    a_implicit: DMatrix<f64>,
    b_implicit: DVector<f64>,
}

impl ImexRkMethod {
    pub fn new(
        name: impl Into<String>,
        c: DVector<f64>,
        a_explicit: DMatrix<f64>,
        b_explicit: DVector<f64>,
        a_implicit: DMatrix<f64>,
        b_implicit: DVector<f64>,
    ) -> Result<Self, GlmError> {
        let sigma = c.len();
        crate::glm::check_shape("A_explicit", &a_explicit, sigma, sigma)?;
        crate::glm::check_shape("A_implicit", &a_implicit, sigma, sigma)?;
        if b_explicit.len() != sigma {
            return Err(GlmError::shape("b_explicit", sigma, b_explicit.len()));
        }
        if b_implicit.len() != sigma {
            return Err(GlmError::shape("b_implicit", sigma, b_implicit.len()));
        }
        for i in 0..sigma {
            for j in i..sigma {
                if a_explicit[(i, j)] != 0.0 {
                    return Err(GlmError::shape(
                        "A_explicit",
                        "strictly lower triangular",
                        format!("nonzero entry ({i}, {j})"),
                    ));
                }
                if j > i && a_implicit[(i, j)] != 0.0 {
                    return Err(GlmError::shape(
                        "A_implicit",
                        "lower triangular",
                        format!("nonzero entry ({i}, {j})"),
                    ));
                }
            }
        }
        Ok(Self {
            name: name.into(),
            c,
            a_explicit,
            b_explicit,
            a_implicit,
            b_implicit,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }
    pub fn stages(&self) -> usize {
        self.c.len()
    }
    pub fn c(&self) -> &DVector<f64> {
        &self.c
    }
    pub fn a_explicit(&self) -> &DMatrix<f64> {
        &self.a_explicit
    }
    pub fn b_explicit(&self) -> &DVector<f64> {
        &self.b_explicit
    }
    pub fn a_implicit(&self) -> &DMatrix<f64> {
        &self.a_implicit
    }
    pub fn b_implicit(&self) -> &DVector<f64> {
        &self.b_implicit
    }

    /// IMEX-Euler written as a two-stage additive Runge-Kutta pair.
    pub fn imex_euler() -> Self {
        Self::new(
            "imex-euler-ark",
            DVector::from_vec(vec![0.0, 1.0]),
            DMatrix::from_row_slice(2, 2, &[0.0, 0.0, 1.0, 0.0]),
            DVector::from_vec(vec![1.0, 0.0]),
            DMatrix::from_row_slice(2, 2, &[0.0, 0.0, 0.0, 1.0]),
            DVector::from_vec(vec![0.0, 1.0]),
        )
        .expect("IMEX-Euler ARK shapes")
    }
}

pub fn ark_to_json(m: &ImexRkMethod) -> Value {
    json!({
        "name": m.name(),
        "sigma": m.stages(),
        "c": vec_value(m.c()),
        "A_explicit": mat_value(m.a_explicit()),
        "b_explicit": vec_value(m.b_explicit()),
        "A_implicit": mat_value(m.a_implicit()),
        "b_implicit": vec_value(m.b_implicit()),
    })
}

/// Parses an additive Runge-Kutta file. The implicit abscissae (the optional
/// `c_implicit` field, or else the row sums of `A_implicit`) must agree with
/// `c` within [`ABSCISSA_TOL`].
pub fn ark_from_json(value: &Value) -> Result<ImexRkMethod, GlmError> {
    let obj = value.as_object().ok_or_else(|| GlmError::Parse {
        field: "<root>".to_string(),
        reason: "expected a JSON object".to_string(),
    })?;
    let name = obj
        .get("name")
        .and_then(Value::as_str)
        .unwrap_or("ark")
        .to_string();
    let sigma = crate::glm::io::parse_usize(obj, "sigma")?;
    let c = parse_vec(obj, "c")?;
    if c.len() != sigma {
        return Err(GlmError::shape("c", sigma, c.len()));
    }
    let a_explicit = parse_mat(obj, "A_explicit")?;
    let b_explicit = parse_vec(obj, "b_explicit")?;
    let a_implicit = parse_mat(obj, "A_implicit")?;
    let b_implicit = parse_vec(obj, "b_implicit")?;
    crate::glm::check_shape("A_implicit", &a_implicit, sigma, sigma)?;
    let c_implicit = if obj.contains_key("c_implicit") {
        parse_vec(obj, "c_implicit")?
    } else {
        DVector::from_fn(sigma, |i, _| a_implicit.row(i).sum())
    };
    if c_implicit.len() != sigma {
        return Err(GlmError::shape("c_implicit", sigma, c_implicit.len()));
    }
    let mismatch = (&c - &c_implicit).amax();
    if mismatch > ABSCISSA_TOL {
        return Err(GlmError::Parse {
            field: "c_implicit".to_string(),
            reason: format!("implicit abscissae differ from c by {mismatch:e}"),
        });
    }
    ImexRkMethod::new(name, c, a_explicit, b_explicit, a_implicit, b_implicit)
}

pub fn load_ark_method(path: impl AsRef<Path>) -> Result<ImexRkMethod, GlmError> {
    let text = fs::read_to_string(path)?;
    let value: Value = serde_json::from_str(&text).map_err(|e| GlmError::Parse {
        field: "<root>".to_string(),
        reason: e.to_string(),
    })?;
    ark_from_json(&value)
}

pub fn write_ark_method(m: &ImexRkMethod, path: impl AsRef<Path>) -> Result<(), GlmError> {
    let text = serde_json::to_string_pretty(&ark_to_json(m)).expect("json serialization");
    fs::write(path, text + "\n")?;
    Ok(())
}

// Coefficients as printed to 15 digits in the published tables.

const DIMSIM4_A: [[f64; 4]; 4] = [
    [0.0, 0.0, 0.0, 0.0],
    [0.258897065974412, 0.0, 0.0, 0.0],
    [2.729801825357062, -0.060004247312668, 0.0, 0.0],
    [0.951308318232761, 0.61416049428904, 0.422498793609078, 0.0],
];
const DIMSIM4_B: [[f64; 4]; 4] = [
    [5.669708110906782, -0.493235358869745, 0.021475944586626, 0.175951726795284],
    [5.544708110906782, 0.020653530019144, -0.797968499857818, 0.680943549709761],
    [4.720814974705226, 3.191226074825372, -5.227438428178271, 0.686166890688894],
    [4.848863779632135, 2.337640759837926, -3.218585217497575, 0.418013495315584],
];
const DIMSIM4_Q: [[f64; 5]; 4] = [
    [1.0, 0.0, 0.0, 0.0, 0.0],
    [1.0, 0.074436267358921, 0.055555555555556, 0.006172839506173, 0.000514403292181],
    [1.0, -2.003130911377728, 0.242223637993112, 0.052716285344531, 0.008600849263247],
    [1.0, -0.987967606130879, 0.013613972830935, 0.038658018404147, 0.017011414548385],
];
const DIMSIM4_AHAT: [[f64; 4]; 4] = [
    [0.572816062482135, 0.0, 0.0, 0.0],
    [0.294478591621391, 0.572816062482135, 0.0, 0.0],
    [3.754531024312379, -0.446626145372372, 0.572816062482135, 0.0],
    [20.906355951077522, -6.918033573971423, 0.824272703722306, 0.572816062482135],
];
const DIMSIM4_BHAT: [[f64; 4]; 4] = [
    [2.818382755109841, -0.107847984112942, 1.213319973963157, -0.548700992864529],
    [3.266198817591976, -1.885223345152593, 3.830771904411522, -1.797738883043436],
    [3.774131970777119, -3.469139895411032, 5.100995462482731, -4.672071998026633],
    [1.800600620848989, 6.203817506581311, -13.4077045837232, -5.034154872439978],
];
const DIMSIM4_QHAT: [[f64; 5]; 4] = [
    [1.0, -0.572816062482135, 0.0, 0.0, 0.0],
    [1.0, -0.533961320770192, -0.135383131938489, -0.025650275076168, -0.003021498328079],
    [1.0, -3.214054274755475, -0.010779770975077, -0.053097178648182, -0.017299808772539],
    [1.0, -14.38541114331054, 1.683679993026802, 0.081422122041277, -0.051803591005091],
];
const DIMSIM4_V: [f64; 4] = [0.281364340879037, -1.282889560784121, 2.266595749735792, -0.265070529830707];
const DIMSIM5_A: [[f64; 5]; 5] = [
    [0.0, 0.0, 0.0, 0.0, 0.0],
    [0.380631951399918, 0.0, 0.0, 0.0, 0.0],
    [-0.723344119927179, 0.934338548518619, 0.0, 0.0, 0.0],
    [-0.292421654731536, 1.489386717103117, 0.229042913082062, 0.0, 0.0],
    [10.333193352608074, 0.200217292186561, 0.841800685401247, -0.14891888997516, 0.0],
];
const DIMSIM5_B: [[f64; 5]; 5] = [
    [-1.811278483713069, 2.072219536433343, 0.130011155311711, 0.16627956860091, 0.117403740739418],
    [-1.724125705935292, 1.629858425322231, 1.038344488645044, -0.796914875843534, 0.396841233783945],
    [-1.998394810009466, 3.088356723470882, -2.146707663207811, 2.854109498231544, -0.833722659704275],
    [-1.361504766226497, 0.334933035918415, 2.154212895587752, 0.353113262914561, -1.482126886275562],
    [5.091061924499312, -29.45891096237624, 55.14392086059348, -43.44044798531985, 3.112719239754878],
];
const DIMSIM5_Q: [[f64; 6]; 5] = [
    [1.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [1.0, -0.130631951399918, 0.03125, 0.002604166666667, 0.000162760416667, 8.138020833e-06],
    [1.0, 0.28900557140856, -0.108584637129655, -0.008364746307874, 0.000170993363233, 0.000108343335202],
    [1.0, -0.676007975453643, -0.20561813581681, -0.00486119904473, 0.004533255151668, 0.001138659940362],
    [1.0, -10.226292440220721, 0.140734501734106, 0.097068228416195, 0.03407861264045, 0.008071842745668],
];
const DIMSIM5_AHAT: [[f64; 5]; 5] = [
    [0.278053841136452, 0.0, 0.0, 0.0, 0.0],
    [0.22045227618258, 0.278053841136452, 0.0, 0.0, 0.0],
    [2.294819895736366, -0.602366708071285, 0.278053841136452, 0.0, 0.0],
    [5.054620901153854, -1.529876218309763, 0.097119141498823, 0.278053841136452, 0.0],
    [9.345167780108133, -1.412133513099773, -1.88340199851787, 0.78253395544687, 0.278053841136452],
];
const DIMSIM5_BHAT: [[f64; 5]; 5] = [
    [6.044855283302179, -2.020000467205476, 0.032934533641225, 0.593578985923315, -0.226664851205853],
    [5.853954219943505, -1.072092372634326, -1.839270544389963, 2.410922952843391, -0.899263047489796],
    [6.004175007913425, -2.014097375842605, 0.610845429880394, -0.963490004887004, -0.405182760273902],
    [6.002703177071046, -2.556003283230891, 3.151551366098853, -5.493514217893924, 0.448102618067392],
    [4.481882795290198, 2.672564354868939, -1.413660973235832, -8.05815479374699, 0.909905877341711],
];
const DIMSIM5_QHAT: [[f64; 6]; 5] = [
    [1.0, -0.278053841136452, 0.0, 0.0, 0.0, 0.0],
    [1.0, -0.248506117319032, -0.038263460284113, -0.006085015868847, -0.00056133812796, -3.7118138206e-05],
    [1.0, -1.470507028801533, 0.136564756449595, 0.004900562818504, -0.001619958388074, -0.000365640421568],
    [1.0, -3.149917665479366, 0.40661910297569, 0.0277785963152, -0.004406329750951, -0.001692120959916],
    [1.0, -6.110220065073812, 0.929780069812273, 0.08710649322811, -0.01678258627228, -0.008434321001423],
];
const DIMSIM5_V: [f64; 5] = [-0.079385465132435, 0.554317572910577, -1.569589549144155, 2.332074592443682, -0.237417151077669];
