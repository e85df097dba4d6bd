#pragma once

#include <cstdio>
#include <memory>
#include <string>
#include <vector>

#include "metanets/engine.hpp"

namespace metanets {

/// Writes the standard trace CSV. Header (fixed):
/// time_h,entity,section,rho_veh_km_lane,v_km_h,q_veh_h,q_veh_h_lane,w_veh,l_st_veh,w_st_veh
/// One row per freeway section, queue link and station per recorded step;
/// non-applicable fields are left empty. Output is byte-deterministic.
class CsvTraceWriter : public TraceSink {
 public:
  explicit CsvTraceWriter(std::string* out) : out_(out) {}
  void on_record(const RecordView& rec) override;
  static const char* header();

 private:
  std::string* out_;
};

/// Extracts one scalar quantity per record. Quantity ids:
///   q_<link>       exit flow, total veh/h (freeway exit section, queue or
///                  station outflow)
///   q_lane_<link>  freeway exit flow per lane
///   rho_<link>     first-section density
///   v_<link>       first-section speed
///   w_<id>         queue length (queue link) or exit queue (station)
///   l_<station>    station occupancy
///   qmax_<station> station merge-back capacity
class SeriesProbe : public TraceSink {
 public:
  SeriesProbe(const CompiledNetwork& net, const std::string& quantity);
  void on_record(const RecordView& rec) override;

  const std::vector<double>& times() const { return times_; }
  const std::vector<double>& values() const { return values_; }
  const std::string& quantity() const { return quantity_; }

  static bool known(const CompiledNetwork& net, const std::string& quantity);

 private:
  enum class Kind { flow, flow_lane, rho, speed, queue, occupancy, qmax };
  Kind kind_;
  bool is_station_ = false;
  bool queue_flow_ = false;  // q_<id> where id is a queue link
  int index_ = -1;
  std::string quantity_;
  std::vector<double> times_;
  std::vector<double> values_;
};

/// Writes "<time_h> <value>" lines, one file per quantity.
void write_series_file(const std::string& path, const SeriesProbe& probe);

void write_text_file(const std::string& path, const std::string& content);

}  // namespace metanets
