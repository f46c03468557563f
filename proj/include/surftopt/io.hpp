// File output and exchange formats: legacy ASCII VTK for visualization,
// CSV for run histories and quotient tables, and line-oriented text files
// for nodal fields and element labels. All writers are atomic (temp file
// plus rename) and print doubles with 17 significant digits so that a
// reader recovers the exact binary values.

#pragma once

#include <string>
#include <utility>
#include <vector>

#include "surftopt/asymptotics.hpp"
#include "surftopt/levelset.hpp"
#include "surftopt/mesh.hpp"

namespace surftopt {

// %.17g rendering; parsing it back yields the identical double.
std::string format_double(double v);

// Writes content to path via a temporary file in the same directory
// followed by an atomic rename. Throws IoError.
void write_text_atomic(const std::string& path, const std::string& content);

// Legacy ASCII VTK POLYDATA: mesh geometry, optional per-vertex scalar
// fields, optional per-element material labels (as integers 1/2).
void write_vtk(const std::string& path, const SurfaceMesh& mesh,
               const std::vector<std::pair<std::string, const VertexField*>>& point_fields,
               const MaterialIndicator* materials = nullptr);

// Nodal field exchange format: first line is the value count, then one
// value per line.
void write_field_file(const std::string& path, const VertexField& f);
VertexField read_field_file(const std::string& path, const SurfaceMesh& mesh);

// Element label exchange format: first line is the element count, then
// one label (1 or 2) per line.
void write_indicator_file(const std::string& path, const MaterialIndicator& m);
MaterialIndicator read_indicator_file(const std::string& path, const SurfaceMesh& mesh);

// Optimization history: header iter,J,theta,kappa,cg_iters and one row
// per record.
void write_history_csv(const std::string& path, const std::vector<IterationRecord>& history);

// Quotient study: header eps,area_exact,area_mesh,J_pert,quotient,
// td_formula,rel_err and one row per radius.
void write_quotient_csv(const std::string& path, const QuotientTable& table);

}  // namespace surftopt
