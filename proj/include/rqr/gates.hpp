#pragma once

#include <string>
#include <variant>

#include "rqr/dispersive.hpp"
#include "rqr/fock.hpp"

namespace rqr {

// exp(-i theta (s+ a + s- a^dagger)), i.e. g_a t = theta.
struct GateA {
    double theta = 0.0;
};

struct GateB {
    double theta = 0.0;
};

// Qubit rotation on every pair (|0,n_a,n_b>, |1,n_a,n_b>) with n_a - n_b = n.
struct GateR {
    int n = 0;
    double theta = 0.0;
    double phi = 0.0;
};

using GateDescriptor = std::variant<GateA, GateB, GateR>;

// Wraps into [0, 2pi).
double wrap_angle(double x);

DenseOperator gate_A(const HilbertSpace& space, double theta);
DenseOperator gate_B(const HilbertSpace& space, double theta);
DenseOperator gate_R(const HilbertSpace& space, int n, double theta, double phi);
DenseOperator gate_matrix(const HilbertSpace& space, const GateDescriptor& g);

// In-place pairwise rotation; adjoint applies the inverse gate.
void apply_gate(StateVector& psi, const GateDescriptor& g, bool adjoint = false);

// Physical duration of the gate under p: theta/g_a, theta/g_b or theta/Omega.
double gate_duration(const GateDescriptor& g, const SystemParams& p);

bool is_identity(const GateDescriptor& g);

char gate_kind(const GateDescriptor& g);
std::string describe(const GateDescriptor& g);

}  // namespace rqr
