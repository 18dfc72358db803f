#pragma once

// Umbrella header for the qPCF implementation.

#include "qpcf/ast.hpp"
#include "qpcf/circuit.hpp"
#include "qpcf/driver.hpp"
#include "qpcf/eval.hpp"
#include "qpcf/gates.hpp"
#include "qpcf/index.hpp"
#include "qpcf/parser.hpp"
#include "qpcf/prelude.hpp"
#include "qpcf/printer.hpp"
#include "qpcf/qasm.hpp"
#include "qpcf/qsim.hpp"
#include "qpcf/typecheck.hpp"
