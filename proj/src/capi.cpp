#include "ptcov/ptcov.h"

#include <cstring>
#include <new>
#include <span>
#include <string>

#include "core/commands.hpp"
#include "core/common.hpp"
#include "core/depmeasure.hpp"
#include "core/fileio.hpp"

namespace {

thread_local std::string g_last_error;

ptcov_status status_of(ptcov::ErrorKind kind) {
  switch (kind) {
    case ptcov::ErrorKind::invalid_argument:
      return PTCOV_ERR_ARGUMENT;
    case ptcov::ErrorKind::io:
      return PTCOV_ERR_IO;
    case ptcov::ErrorKind::data:
      return PTCOV_ERR_DATA;
    case ptcov::ErrorKind::numeric:
      return PTCOV_ERR_NUMERIC;
    case ptcov::ErrorKind::internal:
      return PTCOV_ERR_INTERNAL;
  }
  return PTCOV_ERR_INTERNAL;
}

template <typename Fn>
ptcov_status guarded(Fn&& fn) {
  try {
    fn();
    return PTCOV_OK;
  } catch (const ptcov::Error& e) {
    g_last_error = e.what();
    return status_of(e.kind());
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return PTCOV_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return PTCOV_ERR_INTERNAL;
  }
}

char* dup_string(const std::string& s) {
  char* out = new (std::nothrow) char[s.size() + 1];
  if (out) std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

}  // namespace

struct ptcov_pattern {
  ptcov::PointPattern value;
};

struct ptcov_field {
  ptcov::ScalarField value;
};

extern "C" {

const char* ptcov_version(void) { return "0.1.0"; }

const char* ptcov_last_error(void) { return g_last_error.c_str(); }

ptcov_status ptcov_pattern_read_csv(const char* path, const double window_rect[4],
                                    ptcov_pattern** out) {
  return guarded([&] {
    if (!path || !window_rect || !out)
      ptcov::fail(ptcov::ErrorKind::invalid_argument, "null argument");
    ptcov::Window window = ptcov::Window::rectangle(window_rect[0], window_rect[1],
                                                    window_rect[2], window_rect[3]);
    *out = new ptcov_pattern{ptcov::read_pattern_csv(path, std::move(window))};
  });
}

ptcov_status ptcov_pattern_write_csv(const ptcov_pattern* pattern, const char* path) {
  return guarded([&] {
    if (!pattern || !path) ptcov::fail(ptcov::ErrorKind::invalid_argument, "null argument");
    ptcov::write_pattern_csv(pattern->value, path);
  });
}

long ptcov_pattern_size(const ptcov_pattern* pattern) {
  return pattern ? static_cast<long>(pattern->value.size()) : -1;
}

ptcov_status ptcov_pattern_point(const ptcov_pattern* pattern, long index, double* x, double* y) {
  return guarded([&] {
    if (!pattern || !x || !y) ptcov::fail(ptcov::ErrorKind::invalid_argument, "null argument");
    if (index < 0 || index >= static_cast<long>(pattern->value.size()))
      ptcov::fail(ptcov::ErrorKind::invalid_argument, "point index out of range");
    *x = pattern->value.points[static_cast<std::size_t>(index)].x;
    *y = pattern->value.points[static_cast<std::size_t>(index)].y;
  });
}

void ptcov_pattern_free(ptcov_pattern* pattern) { delete pattern; }

ptcov_status ptcov_field_read_asc(const char* path, ptcov_field** out) {
  return guarded([&] {
    if (!path || !out) ptcov::fail(ptcov::ErrorKind::invalid_argument, "null argument");
    *out = new ptcov_field{ptcov::read_asc(path)};
  });
}

ptcov_status ptcov_field_write_asc(const ptcov_field* field, const char* path) {
  return guarded([&] {
    if (!field || !path) ptcov::fail(ptcov::ErrorKind::invalid_argument, "null argument");
    ptcov::write_asc(field->value, path);
  });
}

ptcov_status ptcov_field_lookup(const ptcov_field* field, double x, double y, double* value) {
  return guarded([&] {
    if (!field || !value) ptcov::fail(ptcov::ErrorKind::invalid_argument, "null argument");
    *value = field->value.lookup(ptcov::Vec2{x, y});
  });
}

ptcov_status ptcov_field_integrate(const ptcov_field* field, double* value) {
  return guarded([&] {
    if (!field || !value) ptcov::fail(ptcov::ErrorKind::invalid_argument, "null argument");
    *value = ptcov::integrate(field->value);
  });
}

void ptcov_field_free(ptcov_field* field) { delete field; }

ptcov_status ptcov_kendall_tau(const double* a, const double* b, long n, double* out) {
  return guarded([&] {
    if (!a || !b || !out) ptcov::fail(ptcov::ErrorKind::invalid_argument, "null argument");
    *out = ptcov::kendall_tau(std::span<const double>(a, static_cast<std::size_t>(n)),
                              std::span<const double>(b, static_cast<std::size_t>(n)));
  });
}

ptcov_status ptcov_run_command(const char* command, const char* config_json, char** report_json) {
  return guarded([&] {
    if (!command || !config_json || !report_json)
      ptcov::fail(ptcov::ErrorKind::invalid_argument, "null argument");
    ptcov::Json config;
    try {
      config = ptcov::Json::parse(config_json);
    } catch (const std::exception& e) {
      ptcov::fail(ptcov::ErrorKind::invalid_argument, std::string("config is not valid JSON: ") + e.what());
    }
    ptcov::Json report = ptcov::run_command(command, config);
    *report_json = dup_string(report.dump(2) + "\n");
    if (!*report_json) ptcov::fail(ptcov::ErrorKind::internal, "out of memory");
  });
}

void ptcov_string_free(char* s) { delete[] s; }

}  // extern "C"
