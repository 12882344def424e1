#pragma once

#include <string>

#include "biholder/covers.hpp"
#include "biholder/dimension.hpp"
#include "biholder/embedding.hpp"
#include "biholder/metric_space.hpp"
#include "biholder/schedule.hpp"
#include "biholder/verify.hpp"

namespace biholder {

// JSON dumps are key-ordered and number-stable, so identical inputs always
// produce identical bytes.

OrderedJson space_to_json(const FiniteMetricSpace& space);
FiniteMetricSpace space_from_json(const OrderedJson& j);

OrderedJson cover_to_json(const ColoredCover& cover);
ColoredCover cover_from_json(const OrderedJson& j);

OrderedJson schedule_to_json(const ScaleSchedule& schedule);
ScaleSchedule schedule_from_json(const OrderedJson& j);

OrderedJson stage_to_json(const EmbeddingStage& stage);
EmbeddingStage stage_from_json(const OrderedJson& j);

OrderedJson lemma_report_to_json(const LemmaReport& report);
OrderedJson cover_report_to_json(const CoverReport& report);
OrderedJson schedule_identities_to_json(const ScheduleIdentityReport& report);
OrderedJson dimension_to_json(const DimensionReport& report);
OrderedJson fastgap_to_json(const FastgapReport& report);
OrderedJson hypercurve_to_json(const HypercurveCertificate& cert);
OrderedJson projection_to_json(const ProjectionReport& report);
OrderedJson refuter_to_json(const RefuterReport& report);

std::string dimension_to_csv(const DimensionReport& report);

// Stable two-space dump with a trailing newline.
std::string dump_artifact(const OrderedJson& j);
void write_artifact(const std::string& path, const OrderedJson& j);
OrderedJson read_json_file(const std::string& path);

}  // namespace biholder
