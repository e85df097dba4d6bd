#include "metanets/trace.hpp"

#include <cmath>
#include <cstring>
#include <limits>
#include <stdexcept>

namespace metanets {

namespace {

const char* kHeader =
    "time_h,entity,section,rho_veh_km_lane,v_km_h,q_veh_h,q_veh_h_lane,w_veh,l_st_veh,w_st_veh";

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

}  // namespace

const char* CsvTraceWriter::header() { return kHeader; }

void CsvTraceWriter::on_record(const RecordView& rec) {
  std::string& out = *out_;
  if (out.empty()) {
    out += kHeader;
    out += '\n';
  }
  const CompiledNetwork& net = *rec.net;
  const std::string t = num(rec.time_h);
  const bool has_speed = !rec.speed.empty();

  for (const auto& cf : net.freeways) {
    const auto& id = net.spec.freeways[cf.spec_index].id;
    for (int i = 0; i < cf.n_sections; ++i) {
      const int sec = cf.first_section + i;
      out += t;
      out += ',';
      out += id;
      out += ',';
      out += std::to_string(i + 1);
      out += ',';
      out += num(rec.rho[sec]);
      out += ',';
      if (has_speed) out += num(rec.speed[sec]);
      out += ',';
      out += num(rec.flow[sec]);
      out += ',';
      out += num(rec.flow[sec] / cf.lanes);
      out += ",,,\n";
    }
  }
  for (std::size_t qi = 0; qi < net.queues.size(); ++qi) {
    const auto& id = net.spec.queues[net.queues[qi].spec_index].id;
    out += t;
    out += ',';
    out += id;
    out += ",,,,";
    out += num(rec.queue_out[qi]);
    out += ",,";
    out += num(rec.queue_w[qi]);
    out += ",,\n";
  }
  for (std::size_t si = 0; si < net.stations.size(); ++si) {
    const auto& id = net.spec.stations[net.stations[si].spec_index].id;
    out += t;
    out += ',';
    out += id;
    out += ",,,,";
    out += num(rec.station_out[si]);
    out += ",,,";
    out += num(rec.stations[si].occupancy);
    out += ',';
    out += num(rec.stations[si].exit_queue);
    out += '\n';
  }
}

SeriesProbe::SeriesProbe(const CompiledNetwork& net, const std::string& quantity)
    : quantity_(quantity) {
  auto starts_with = [&](const char* prefix) {
    return quantity.rfind(prefix, 0) == 0;
  };
  std::string id;
  if (starts_with("q_lane_")) {
    kind_ = Kind::flow_lane;
    id = quantity.substr(7);
  } else if (starts_with("qmax_")) {
    kind_ = Kind::qmax;
    id = quantity.substr(5);
  } else if (starts_with("rho_")) {
    kind_ = Kind::rho;
    id = quantity.substr(4);
  } else if (starts_with("v_")) {
    kind_ = Kind::speed;
    id = quantity.substr(2);
  } else if (starts_with("q_")) {
    kind_ = Kind::flow;
    id = quantity.substr(2);
  } else if (starts_with("w_")) {
    kind_ = Kind::queue;
    id = quantity.substr(2);
  } else if (starts_with("l_")) {
    kind_ = Kind::occupancy;
    id = quantity.substr(2);
  } else {
    throw std::runtime_error("unknown quantity '" + quantity + "'");
  }

  switch (kind_) {
    case Kind::flow: {
      index_ = net.freeway_index(id);
      if (index_ < 0) {
        index_ = net.queue_index(id);
        if (index_ >= 0) {
          kind_ = Kind::queue;  // reuse index class; flow of a queue link
          is_station_ = false;
          queue_flow_ = true;
        } else {
          index_ = net.station_index(id);
          is_station_ = true;
        }
      }
      break;
    }
    case Kind::flow_lane:
    case Kind::rho:
    case Kind::speed:
      index_ = net.freeway_index(id);
      break;
    case Kind::queue:
      index_ = net.queue_index(id);
      if (index_ < 0) {
        index_ = net.station_index(id);
        is_station_ = true;
      }
      break;
    case Kind::occupancy:
    case Kind::qmax:
      index_ = net.station_index(id);
      is_station_ = true;
      break;
  }
  if (index_ < 0)
    throw std::runtime_error("quantity '" + quantity + "' names an unknown entity");
}

bool SeriesProbe::known(const CompiledNetwork& net, const std::string& quantity) {
  try {
    SeriesProbe probe(net, quantity);
    return true;
  } catch (const std::exception&) {
    return false;
  }
}

void SeriesProbe::on_record(const RecordView& rec) {
  const CompiledNetwork& net = *rec.net;
  double v = std::numeric_limits<double>::quiet_NaN();
  switch (kind_) {
    case Kind::flow:
      if (is_station_)
        v = rec.station_out[index_];
      else
        v = rec.flow[net.freeways[index_].last_section];
      break;
    case Kind::flow_lane:
      v = rec.flow[net.freeways[index_].last_section] / net.freeways[index_].lanes;
      break;
    case Kind::rho:
      v = rec.rho[net.freeways[index_].first_section];
      break;
    case Kind::speed:
      if (!rec.speed.empty()) v = rec.speed[net.freeways[index_].first_section];
      break;
    case Kind::queue:
      if (is_station_)
        v = rec.stations[index_].exit_queue;
      else
        v = queue_flow_ ? rec.queue_out[index_] : rec.queue_w[index_];
      break;
    case Kind::occupancy:
      v = rec.stations[index_].occupancy;
      break;
    case Kind::qmax:
      v = rec.station_qmax[index_];
      break;
  }
  times_.push_back(rec.time_h);
  values_.push_back(v);
}

void write_series_file(const std::string& path, const SeriesProbe& probe) {
  std::string content = "# time_h " + probe.quantity() + "\n";
  char buf[96];
  for (std::size_t i = 0; i < probe.times().size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.10g %.10g\n", probe.times()[i], probe.values()[i]);
    content += buf;
  }
  write_text_file(path, content);
}

void write_text_file(const std::string& path, const std::string& content) {
  std::FILE* f = std::fopen(path.c_str(), "wb");
  if (!f) throw std::runtime_error("cannot open '" + path + "' for writing");
  const std::size_t n = std::fwrite(content.data(), 1, content.size(), f);
  std::fclose(f);
  if (n != content.size()) throw std::runtime_error("short write to '" + path + "'");
}

}  // namespace metanets
