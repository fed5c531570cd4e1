//! Dense stability matrices on the mapped Chebyshev grid.
//!
//! The spectral problem `iλ𝒮V = (ℋ + E_p)V` is reduced to the standard
//! problem `λV = −i𝒮(ℋ + E_p)V` using `𝒮² = I`. Unknowns are laid out
//! component by component: all nodes of component 1, then component 2, etc.

use std::io::Write;

use num_complex::Complex64;

use crate::cheb::ChebGrid;
use crate::eigen::ComplexMatrix;
use crate::error::{Error, Result};
use crate::soliton::{ModelKind, SolitonProfile};
use crate::spectrum::SpectralBands;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// Which of the two equivalent formulations to assemble.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Form {
    /// Original four-component system with weight `σ = diag(1, −1, 1, −1)`.
    FullSystem,
    /// Block-diagonal `ℋ = diag(H₊, H₋)` with the skew weight `𝒮`.
    BlockDiagonalized,
}

/// Assembly switches.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct AssemblyOptions {
    /// Replace the soliton by zero, leaving only the free Dirac operator.
    pub zero_potential: bool,
}

/// One `(N+1)×(N+1)` block: `deriv·D̃ + diag(constant + potential + transverse)`.
#[derive(Clone)]
struct Block {
    deriv: Complex64,
    constant: Complex64,
    potential: Option<Vec<Complex64>>,
    transverse: Complex64,
}

impl Block {
    fn zero() -> Self {
        Self {
            deriv: ZERO,
            constant: ZERO,
            potential: None,
            transverse: ZERO,
        }
    }

    fn constant(c: f64) -> Self {
        Self {
            constant: Complex64::new(c, 0.0),
            ..Self::zero()
        }
    }

    fn dirac(deriv: Complex64, omega: f64) -> Self {
        Self {
            deriv,
            ..Self::constant(omega)
        }
    }

    fn with_potential(mut self, v: Vec<Complex64>) -> Self {
        self.potential = Some(v);
        self
    }
}

/// Assembled operator whose eigenvalues are the stability spectrum.
#[derive(Debug, Clone)]
pub struct StabilityOperator {
    pub model: ModelKind,
    pub omega: f64,
    pub p: f64,
    pub form: Form,
    /// Nodes per component, `N + 1`.
    pub nodes: usize,
    pub matrix: ComplexMatrix,
}

pub fn assemble(
    model: ModelKind,
    omega: f64,
    p: f64,
    grid: &ChebGrid,
    form: Form,
) -> Result<StabilityOperator> {
    assemble_with(model, omega, p, grid, form, AssemblyOptions::default())
}

pub fn assemble_with(
    model: ModelKind,
    omega: f64,
    p: f64,
    grid: &ChebGrid,
    form: Form,
    options: AssemblyOptions,
) -> Result<StabilityOperator> {
    if !p.is_finite() {
        return Err(Error::Argument(format!(
            "transverse wavenumber must be finite, got {p}"
        )));
    }
    let profile = SolitonProfile::new(model, omega)?;
    let u: Vec<Complex64> = if options.zero_potential {
        vec![ZERO; grid.len()]
    } else {
        grid.nodes_x()
            .iter()
            .map(|x| profile.eval(x.to_f64()))
            .collect()
    };
    let blocks = hamiltonian_blocks(model, omega, p, &u, form);
    // 𝒮 row r takes block row src with sign
    let weight: [(usize, f64); 4] = match form {
        Form::BlockDiagonalized => [(2, 1.0), (3, -1.0), (0, 1.0), (1, -1.0)],
        Form::FullSystem => [(0, 1.0), (1, -1.0), (2, 1.0), (3, -1.0)],
    };
    let m = grid.len();
    let dim = 4 * m;
    let d = grid.d_scaled();
    let mut matrix = ComplexMatrix::zeros(dim);
    for (r, &(src, sign)) in weight.iter().enumerate() {
        let coef = -I * sign;
        for (c, block) in blocks[src].iter().enumerate() {
            let deriv = coef * block.deriv;
            for i in 0..m {
                let row = r * m + i;
                if deriv != ZERO {
                    for j in 0..m {
                        matrix[(row, c * m + j)] = deriv * d[i * m + j];
                    }
                }
                let mut diag = block.constant;
                if let Some(v) = &block.potential {
                    diag += v[i];
                }
                matrix[(row, c * m + i)] += coef * diag + coef * block.transverse;
            }
        }
    }
    Ok(StabilityOperator {
        model,
        omega,
        p,
        form,
        nodes: m,
        matrix,
    })
}

fn hamiltonian_blocks(
    model: ModelKind,
    omega: f64,
    p: f64,
    u: &[Complex64],
    form: Form,
) -> [[Block; 4]; 4] {
    let map = |f: &dyn Fn(Complex64) -> Complex64| u.iter().map(|&z| f(z)).collect::<Vec<_>>();
    let abs2 = map(&|z| Complex64::new(z.norm_sqr(), 0.0));
    let two_abs2 = map(&|z| Complex64::new(2.0 * z.norm_sqr(), 0.0));
    let u2 = map(&|z| z * z);
    let ub2 = map(&|z| z.conj() * z.conj());
    let mut h: [[Block; 4]; 4] = Default::default();
    let (minus, plus) = (-I, I);
    match form {
        Form::BlockDiagonalized => {
            let (p01, p10, m01) = match model {
                ModelKind::MassiveThirring => (u2.clone(), ub2.clone(), map(&|z| -z * z)),
                ModelKind::GrossNeveu => (
                    map(&|z| z * z + 3.0 * z.conj() * z.conj()),
                    map(&|z| z.conj() * z.conj() + 3.0 * z * z),
                    map(&|z| -z * z - z.conj() * z.conj()),
                ),
            };
            let m10 = match model {
                ModelKind::MassiveThirring => map(&|z| -z.conj() * z.conj()),
                ModelKind::GrossNeveu => m01.clone(),
            };
            h[0][0] = Block::dirac(minus, omega).with_potential(two_abs2.clone());
            h[0][1] = Block::constant(-1.0).with_potential(p01);
            h[1][0] = Block::constant(-1.0).with_potential(p10);
            h[1][1] = Block::dirac(plus, omega).with_potential(two_abs2);
            h[2][2] = Block::dirac(minus, omega);
            h[2][3] = Block::constant(1.0).with_potential(m01);
            h[3][2] = Block::constant(1.0).with_potential(m10);
            h[3][3] = Block::dirac(plus, omega);
            match model {
                ModelKind::MassiveThirring => add_identity(&mut h, p * p),
                ModelKind::GrossNeveu => {
                    let ip = I * p;
                    h[0][3].transverse = ip;
                    h[1][2].transverse = ip;
                    h[2][1].transverse = -ip;
                    h[3][0].transverse = -ip;
                }
            }
        }
        Form::FullSystem => {
            h[0][0] = Block::dirac(minus, omega);
            h[1][1] = Block::dirac(plus, omega);
            h[2][2] = Block::dirac(plus, omega);
            h[3][3] = Block::dirac(minus, omega);
            h[0][2] = Block::constant(-1.0);
            h[1][3] = Block::constant(-1.0);
            h[2][0] = Block::constant(-1.0);
            h[3][1] = Block::constant(-1.0);
            let none = Vec::new();
            let w: [[&Vec<Complex64>; 4]; 4];
            let extra1;
            let extra2;
            match model {
                ModelKind::MassiveThirring => {
                    w = [
                        [&abs2, &none, &u2, &abs2],
                        [&none, &abs2, &abs2, &ub2],
                        [&ub2, &abs2, &abs2, &none],
                        [&abs2, &u2, &none, &abs2],
                    ];
                    add_potentials(&mut h, &w);
                    add_identity(&mut h, p * p);
                }
                ModelKind::GrossNeveu => {
                    extra1 = map(&|z| z * z + 2.0 * z.conj() * z.conj());
                    extra2 = map(&|z| 2.0 * z * z + z.conj() * z.conj());
                    w = [
                        [&abs2, &ub2, &extra1, &abs2],
                        [&u2, &abs2, &abs2, &extra2],
                        [&extra2, &abs2, &abs2, &u2],
                        [&abs2, &extra1, &ub2, &abs2],
                    ];
                    add_potentials(&mut h, &w);
                    // −ipJ with J = [[0, I], [−I, 0]] in 2×2 blocks
                    let ip = I * p;
                    h[0][2].transverse = -ip;
                    h[1][3].transverse = -ip;
                    h[2][0].transverse = ip;
                    h[3][1].transverse = ip;
                }
            }
        }
    }
    h
}

impl Default for Block {
    fn default() -> Self {
        Self::zero()
    }
}

fn add_identity(h: &mut [[Block; 4]; 4], value: f64) {
    for (k, row) in h.iter_mut().enumerate() {
        row[k].transverse = Complex64::new(value, 0.0);
    }
}

fn add_potentials(h: &mut [[Block; 4]; 4], w: &[[&Vec<Complex64>; 4]; 4]) {
    for (r, row) in w.iter().enumerate() {
        for (c, v) in row.iter().enumerate() {
            if !v.is_empty() {
                h[r][c].potential = Some((*v).clone());
            }
        }
    }
}

impl StabilityOperator {
    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    /// Recover `ℋ + E_p = i𝒮A` (or `iσA` for the full system).
    pub fn hamiltonian(&self) -> ComplexMatrix {
        let m = self.nodes;
        let weight: [(usize, f64); 4] = match self.form {
            Form::BlockDiagonalized => [(2, 1.0), (3, -1.0), (0, 1.0), (1, -1.0)],
            Form::FullSystem => [(0, 1.0), (1, -1.0), (2, 1.0), (3, -1.0)],
        };
        let mut h = ComplexMatrix::zeros(self.dim());
        for (r, &(src, sign)) in weight.iter().enumerate() {
            for i in 0..m {
                for col in 0..self.dim() {
                    h[(src * m + i, col)] = I * sign * self.matrix[(r * m + i, col)];
                }
            }
        }
        h
    }

    /// Nonzero entries as `row,col,re,im` lines, row-major.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "row,col,re,im")?;
        let n = self.dim();
        for i in 0..n {
            for j in 0..n {
                let z = self.matrix[(i, j)];
                if z != ZERO {
                    writeln!(out, "{i},{j},{:e},{:e}", z.re, z.im)?;
                }
            }
        }
        Ok(())
    }
}

/// Edges of the continuous spectrum `±iΛ₁`, `±iΛ₂` at transverse wavenumber p.
pub fn continuous_bands(model: ModelKind, omega: f64, p: f64) -> Result<SpectralBands> {
    model.check(omega)?;
    let (outer, inner) = match model {
        ModelKind::MassiveThirring => (1.0 + omega + p * p, 1.0 - omega - p * p),
        ModelKind::GrossNeveu => {
            let r = (1.0 + p * p).sqrt();
            (r + omega, r - omega)
        }
    };
    Ok(SpectralBands::new(model, omega, p, [outer, inner]))
}

/// Largest distance from an eigenvalue's mirror image to the nearest
/// eigenvalue. MTM spectra are mirrored across both axes, GN spectra
/// across the imaginary axis.
pub fn symmetry_residual(values: &[Complex64], model: ModelKind) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::Argument(
            "symmetry residual of an empty spectrum".into(),
        ));
    }
    let mut sorted: Vec<Complex64> = values.to_vec();
    sorted.sort_by(|a, b| a.re.total_cmp(&b.re));
    let nearest = |z: Complex64| -> f64 {
        let start = sorted.partition_point(|w| w.re < z.re);
        let mut best = f64::INFINITY;
        for w in sorted[start..].iter() {
            if w.re - z.re > best {
                break;
            }
            best = best.min((w - z).norm());
        }
        for w in sorted[..start].iter().rev() {
            if z.re - w.re > best {
                break;
            }
            best = best.min((w - z).norm());
        }
        best
    };
    let reflections: &[fn(Complex64) -> Complex64] = match model {
        ModelKind::MassiveThirring => &[|z| z.conj(), |z| -z.conj()],
        ModelKind::GrossNeveu => &[|z| -z.conj()],
    };
    Ok(values
        .iter()
        .flat_map(|&z| reflections.iter().map(move |f| f(z)))
        .map(nearest)
        .fold(0.0, f64::max))
}
