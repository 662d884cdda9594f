#pragma once

#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "findhccs/extract.hpp"
#include "findhccs/lcn.hpp"
#include "findhccs/validate.hpp"

namespace findhccs {

std::string xml_escape(std::string_view text);

/// One edge element per account pair; a "weight" attribute holding the
/// collapsed total plus one attribute per criterion.
void write_lcn_graphml(std::ostream& out, const Lcn& lcn);

void write_collapsed_graphml(std::ostream& out, const CollapsedGraph& g);

/// One graph element per HCC, each carrying its mew.
void write_hccs_graphml(std::ostream& out, const std::vector<Hcc>& hccs);

void write_reason_graphml(std::ostream& out, const ReasonNetwork& net);

}  // namespace findhccs
