#pragma once

namespace bulkq {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr const char* kReportSchema = "bulkq-report/1";

} // namespace bulkq
