#ifndef SBJO_IO_HPP
#define SBJO_IO_HPP

// JSON encodings.  Elements use
//   {"dims":[n1,...],"blocks":[[[ [re,im], ...row... ], ...], ...]}
// with blocks in dims order and rows listed top to bottom.  Linear maps use
//   {"dims":[...],"matrix":[[ [re,im], ... ], ...]}
// in block-major, row-major coordinates.  Every reader throws Error(Parse).

#include "sbjo/algebra.hpp"
#include "sbjo/orthograph.hpp"
#include "sbjo/preservers.hpp"

#include <json.hpp>

#include <string>

namespace sbjo {

using json = nlohmann::json;

json complex_to_json(Complex c);
Complex complex_from_json(const json& j);

json element_to_json(const Element& a);
Element element_from_json(const json& j);

json spec_to_json(const PreserverSpec& spec);
PreserverSpec spec_from_json(const json& j);

json linear_map_to_json(const BlockStructure& structure, const Matrix& m);
std::pair<BlockStructure, Matrix> linear_map_from_json(const json& j);

json graph_to_json(const OrthoGraph& g);
json verify_report_to_json(const VerifyReport& r);
json tolerances_to_json(const ToleranceConfig& tol);

json read_json(const std::string& path);
/// Writes j.dump(2) plus a trailing newline.
void write_json(const std::string& path, const json& j);

Element read_element(const std::string& path);
void write_element(const std::string& path, const Element& a);

}  // namespace sbjo

#endif
