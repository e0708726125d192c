// Copyright 2026 The vppmig Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! Minimal C ABI over the Clarabel interior-point solver, shaped for the
//! `vppmig::program` adapter. Problems arrive in Clarabel's standard form
//!
//!     min q'x  s.t.  A x + s = b,  s in K
//!
//! with K ordered as [zero cone, nonnegative cone, second-order cones...].
//! The objective has no quadratic part.

use clarabel::algebra::CscMatrix;
use clarabel::solver::{
    DefaultSettings, DefaultSolver, IPSolver, SolverStatus, SupportedConeT,
};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::slice;

#[repr(C)]
pub struct VppmigConicProblem {
    pub n: usize,
    pub m: usize,
    pub a_colptr: *const usize,
    pub a_rowval: *const usize,
    pub a_nzval: *const f64,
    pub q: *const f64,
    pub b: *const f64,
    pub n_zero: usize,
    pub n_nonneg: usize,
    pub soc_dims: *const usize,
    pub n_soc: usize,
    pub tol_gap_abs: f64,
    pub tol_gap_rel: f64,
    pub tol_feas: f64,
    pub max_iter: u32,
    pub time_limit: f64,
}

#[repr(C)]
pub struct VppmigConicResult {
    pub status: i32,
    pub obj_val: f64,
    pub iterations: u32,
    pub solve_time: f64,
    pub r_prim: f64,
    pub r_dual: f64,
}

// Status codes shared with the C++ side.
const ST_SOLVED: i32 = 0;
const ST_ALMOST_SOLVED: i32 = 1;
const ST_PRIMAL_INFEASIBLE: i32 = 2;
const ST_DUAL_INFEASIBLE: i32 = 3;
const ST_MAX_ITER: i32 = 4;
const ST_NUMERICAL: i32 = 5;
const ST_SETUP_ERROR: i32 = 6;
const ST_PANIC: i32 = 7;

unsafe fn view<'a, T>(ptr: *const T, len: usize) -> &'a [T] {
    if len == 0 {
        &[]
    } else {
        slice::from_raw_parts(ptr, len)
    }
}

fn map_status(status: SolverStatus) -> i32 {
    match status {
        SolverStatus::Solved => ST_SOLVED,
        SolverStatus::AlmostSolved => ST_ALMOST_SOLVED,
        SolverStatus::PrimalInfeasible | SolverStatus::AlmostPrimalInfeasible => {
            ST_PRIMAL_INFEASIBLE
        }
        SolverStatus::DualInfeasible | SolverStatus::AlmostDualInfeasible => ST_DUAL_INFEASIBLE,
        SolverStatus::MaxIterations | SolverStatus::MaxTime => ST_MAX_ITER,
        _ => ST_NUMERICAL,
    }
}

/// Solves the problem and writes the primal point into `x_out` (length n).
/// Returns the status code, which is also stored in `out.status`.
///
/// # Safety
/// All pointers must be valid for the lengths implied by `problem`.
#[no_mangle]
pub unsafe extern "C" fn vppmig_clarabel_solve(
    problem: *const VppmigConicProblem,
    x_out: *mut f64,
    out: *mut VppmigConicResult,
) -> i32 {
    let result = catch_unwind(AssertUnwindSafe(|| {
        let p = &*problem;
        let colptr = view(p.a_colptr, p.n + 1).to_vec();
        let nnz = colptr[p.n];
        let rowval = view(p.a_rowval, nnz).to_vec();
        let nzval = view(p.a_nzval, nnz).to_vec();
        let a = CscMatrix::new(p.m, p.n, colptr, rowval, nzval);
        let pmat = CscMatrix::<f64>::zeros((p.n, p.n));
        let q = view(p.q, p.n);
        let b = view(p.b, p.m);

        let mut cones: Vec<SupportedConeT<f64>> = Vec::new();
        if p.n_zero > 0 {
            cones.push(SupportedConeT::ZeroConeT(p.n_zero));
        }
        if p.n_nonneg > 0 {
            cones.push(SupportedConeT::NonnegativeConeT(p.n_nonneg));
        }
        for &dim in view(p.soc_dims, p.n_soc) {
            cones.push(SupportedConeT::SecondOrderConeT(dim));
        }

        let settings = DefaultSettings::<f64> {
            verbose: false,
            max_iter: p.max_iter,
            time_limit: p.time_limit,
            tol_gap_abs: p.tol_gap_abs,
            tol_gap_rel: p.tol_gap_rel,
            tol_feas: p.tol_feas,
            max_threads: 1,
            ..DefaultSettings::default()
        };

        let mut solver = match DefaultSolver::new(&pmat, q, &a, b, &cones, settings) {
            Ok(s) => s,
            Err(_) => return (ST_SETUP_ERROR, None),
        };
        solver.solve();
        let sol = &solver.solution;
        let res = VppmigConicResult {
            status: map_status(sol.status),
            obj_val: sol.obj_val,
            iterations: sol.iterations,
            solve_time: sol.solve_time,
            r_prim: sol.r_prim,
            r_dual: sol.r_dual,
        };
        let x = view(x_out as *const f64, p.n).as_ptr() as *mut f64;
        for (k, v) in sol.x.iter().enumerate() {
            *x.add(k) = *v;
        }
        (res.status, Some(res))
    }));

    match result {
        Ok((status, Some(res))) => {
            *out = res;
            status
        }
        Ok((status, None)) => {
            (*out).status = status;
            status
        }
        Err(_) => {
            (*out).status = ST_PANIC;
            ST_PANIC
        }
    }
}
