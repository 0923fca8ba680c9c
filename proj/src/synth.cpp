/*
 * Copyright 2026 The echokit Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "echokit/synth.hpp"

#include "echokit/error.hpp"
#include "echokit/parallel.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <iomanip>
#include <iterator>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

namespace echokit {

void SynthConfig::validate() const {
    header.validate();
    if (!(background_level >= 0.0 && background_level <= 255.0))
        fail(ErrorCode::Validation, "background_level: must lie in [0, 255]");
    if (!(noise_sigma >= 0.0) || !std::isfinite(noise_sigma))
        fail(ErrorCode::Validation, "noise_sigma: must be finite and >= 0");
    if (window < 1) fail(ErrorCode::Validation, "window: must be >= 1");
    double min_peak = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < fish.size(); ++i) {
        const SynthFish& f = fish[i];
        const std::string which = "fish " + std::to_string(i) + ": ";
        if (!(f.peak_intensity > 0.0 && f.peak_intensity <= 255.0))
            fail(ErrorCode::Validation, which + "peak_intensity must lie in (0, 255]");
        if (!(f.blob_sigma_rows > 0.0) || !(f.blob_sigma_beams > 0.0))
            fail(ErrorCode::Validation, which + "blob sigmas must be > 0");
        for (double v : {f.speed, f.entry_beam, f.range_row, f.range_drift})
            if (!std::isfinite(v)) fail(ErrorCode::Validation, which + "motion parameters must be finite");
        min_peak = std::min(min_peak, f.peak_intensity);
    }
    if (!fish.empty() && !(background_level + 3.0 * noise_sigma < min_peak))
        fail(ErrorCode::Validation,
             "background_level + 3*noise_sigma must stay below the dimmest fish peak");
}

namespace {

// Standard normal deviates from mt19937_64 via Box-Muller; std::normal_distribution
// is implementation-defined, this is not.
class NormalStream {
public:
    explicit NormalStream(std::uint64_t seed) : engine_(seed) {}

    double next() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * std::numbers::pi * u2;
        spare_ = radius * std::sin(angle);
        has_spare_ = true;
        return radius * std::cos(angle);
    }

private:
    double uniform() { return double(engine_() >> 11) * 0x1.0p-53; }

    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

bool in_view(const ClipHeader& h, double beam, double row) {
    return beam >= 0.0 && beam <= double(h.beam_count - 1) && row >= 0.0 &&
           row <= double(h.range_samples - 1);
}

} // namespace

SynthResult synth_clip(const SynthConfig& config) {
    config.validate();
    const ClipHeader& h = config.header;
    const std::size_t frame_size = h.frame_size();

    TrackSet tracks;
    tracks.clip_id = config.clip_id;
    tracks.upstream_side = h.upstream_side;

    std::vector<double> canvas(frame_size * h.frame_count, config.background_level);
    if (config.noise_sigma > 0.0) {
        NormalStream noise(config.seed);
        for (double& v : canvas) v += config.noise_sigma * noise.next();
    }

    for (std::size_t i = 0; i < config.fish.size(); ++i) {
        const SynthFish& f = config.fish[i];
        Track track;
        track.id = "fish" + std::to_string(i);
        for (std::uint32_t t = f.entry_frame; t < h.frame_count; ++t) {
            const double beam = f.beam_at(t);
            const double row = f.row_at(t);
            if (!in_view(h, beam, row)) {
                if (!track.points.empty()) break; // left the field of view
                continue;
            }
            const double x = beam / double(h.beam_count - 1);
            const double y = h.range_samples > 1 ? row / double(h.range_samples - 1) : 0.0;
            track.points.push_back({t, x, y});

            double* frame = canvas.data() + std::size_t(t) * frame_size;
            const double reach_r = 4.0 * f.blob_sigma_rows;
            const double reach_b = 4.0 * f.blob_sigma_beams;
            const auto r0 = static_cast<std::uint32_t>(std::max(0.0, std::ceil(row - reach_r)));
            const auto r1 = static_cast<std::uint32_t>(std::min(double(h.range_samples - 1), std::floor(row + reach_r)));
            const auto b0 = static_cast<std::uint32_t>(std::max(0.0, std::ceil(beam - reach_b)));
            const auto b1 = static_cast<std::uint32_t>(std::min(double(h.beam_count - 1), std::floor(beam + reach_b)));
            for (std::uint32_t r = r0; r <= r1; ++r) {
                const double dr = (r - row) / f.blob_sigma_rows;
                for (std::uint32_t b = b0; b <= b1; ++b) {
                    const double db = (b - beam) / f.blob_sigma_beams;
                    frame[std::size_t(r) * h.beam_count + b] +=
                        f.peak_intensity * std::exp(-0.5 * (dr * dr + db * db));
                }
            }
        }
        if (track.points.empty())
            tracks.notes.push_back("warning: " + track.id + " never enters the field of view; no track emitted");
        else
            tracks.tracks.push_back(std::move(track));
    }

    std::vector<std::uint8_t> samples(canvas.size());
    std::transform(canvas.begin(), canvas.end(), samples.begin(), [](double v) {
        return static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 255.0)));
    });

    SynthResult result{Clip(h, std::move(samples)), std::move(tracks), {}};
    result.labels = tracks_to_counts(orient(result.tracks), config.window, h.frame_count,
                                     LabelSource::Synthetic);
    return result;
}

SynthConfig suite_config(std::uint64_t seed, std::uint32_t index) {
    std::mt19937_64 rng(splitmix64(seed ^ splitmix64(index)));
    auto uniform = [&](double lo, double hi) { return lo + (hi - lo) * (double(rng() >> 11) * 0x1.0p-53); };
    auto integer = [&](std::uint32_t lo, std::uint32_t hi) {
        return lo + static_cast<std::uint32_t>(rng() % (std::uint64_t(hi) - lo + 1));
    };

    SynthConfig config;
    config.clip_id = "suite" + std::to_string(seed) + "_" + std::to_string(index);
    config.window = 200;
    config.header.frame_count = 400;
    config.header.range_samples = 48;
    config.header.beam_count = 32;
    config.header.frame_rate = 10.0f;
    config.header.window_start = static_cast<float>(integer(1, 4));
    config.header.window_end = config.header.window_start + static_cast<float>(integer(6, 12));
    config.header.beam_fov = 28.0f;
    config.header.upstream_side = rng() & 1 ? Side::Right : Side::Left;
    config.background_level = uniform(15.0, 40.0);
    config.noise_sigma = uniform(2.0, 6.0);
    config.seed = rng();

    const double max_beam = config.header.beam_count - 1;
    const double max_row = config.header.range_samples - 1;
    const double floor_peak = config.background_level + 3.0 * config.noise_sigma + 60.0;
    for (std::uint32_t w = 0; w * config.window < config.header.frame_count; ++w) {
        const std::uint32_t n_fish = integer(0, 8);
        for (std::uint32_t k = 0; k < n_fish; ++k) {
            SynthFish f;
            // Most fish go upstream, as in a spawning run.
            const bool upstream = uniform(0.0, 1.0) < 0.7;
            const bool rightward = upstream == (config.header.upstream_side == Side::Right);
            const double magnitude = uniform(0.25, 0.9);
            const bool milling = uniform(0.0, 1.0) < 0.1;
            f.speed = (rightward ? 1.0 : -1.0) * (milling ? magnitude * 0.05 : magnitude);
            f.entry_beam = rightward ? uniform(0.0, 0.3 * max_beam) : uniform(0.7 * max_beam, max_beam);
            f.entry_frame = w * config.window + integer(0, config.window - 1);
            f.range_row = uniform(4.0, max_row - 4.0);
            f.range_drift = uniform(-0.04, 0.04);
            f.peak_intensity = uniform(std::min(floor_peak, 254.0), 255.0);
            f.blob_sigma_rows = uniform(1.0, 2.5);
            f.blob_sigma_beams = uniform(0.8, 1.8);
            config.fish.push_back(f);
        }
    }
    return config;
}

std::vector<SynthResult> synth_suite(std::uint32_t n_clips, std::uint64_t seed, unsigned jobs) {
    if (n_clips < 1) fail(ErrorCode::Argument, "synth suite needs at least one clip");
    std::vector<SynthResult> suite(n_clips);
    parallel_for(n_clips, jobs, [&](std::size_t i) {
        suite[i] = synth_clip(suite_config(seed, static_cast<std::uint32_t>(i)));
    });
    return suite;
}

namespace {

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
    T out{};
    const char* end = value.data() + value.size();
    const auto [ptr, ec] = std::from_chars(value.data(), end, out);
    if (ec != std::errc{} || ptr != end || value.empty())
        fail(ErrorCode::Validation, key + ": cannot parse '" + value + "'");
    return out;
}

} // namespace

SynthConfig parse_synth_config(const std::string& text) {
    SynthConfig config;
    std::istringstream in(text);
    std::string line;
    std::size_t number = 0;
    while (std::getline(in, line)) {
        ++number;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            fail(ErrorCode::Format, "synth config line " + std::to_string(number) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        ClipHeader& h = config.header;
        if (key == "clip_id") config.clip_id = value;
        else if (key == "frame_count") h.frame_count = parse_number<std::uint32_t>(key, value);
        else if (key == "range_samples") h.range_samples = parse_number<std::uint32_t>(key, value);
        else if (key == "beam_count") h.beam_count = parse_number<std::uint32_t>(key, value);
        else if (key == "frame_rate") h.frame_rate = parse_number<float>(key, value);
        else if (key == "window_start") h.window_start = parse_number<float>(key, value);
        else if (key == "window_end") h.window_end = parse_number<float>(key, value);
        else if (key == "beam_fov") h.beam_fov = parse_number<float>(key, value);
        else if (key == "upstream_side") h.upstream_side = parse_side(value);
        else if (key == "background_level") config.background_level = parse_number<double>(key, value);
        else if (key == "noise_sigma") config.noise_sigma = parse_number<double>(key, value);
        else if (key == "seed") config.seed = parse_number<std::uint64_t>(key, value);
        else if (key == "window") config.window = parse_number<std::uint32_t>(key, value);
        else if (key == "fish") {
            std::istringstream fields(value);
            const std::vector<std::string> tokens{std::istream_iterator<std::string>(fields),
                                                  std::istream_iterator<std::string>()};
            if (tokens.size() != 8)
                fail(ErrorCode::Validation, "fish (line " + std::to_string(number) +
                                                "): expected 8 numbers: entry_frame speed entry_beam "
                                                "range_row range_drift peak sigma_rows sigma_beams");
            SynthFish f;
            f.entry_frame = parse_number<std::uint32_t>(key, tokens[0]);
            f.speed = parse_number<double>(key, tokens[1]);
            f.entry_beam = parse_number<double>(key, tokens[2]);
            f.range_row = parse_number<double>(key, tokens[3]);
            f.range_drift = parse_number<double>(key, tokens[4]);
            f.peak_intensity = parse_number<double>(key, tokens[5]);
            f.blob_sigma_rows = parse_number<double>(key, tokens[6]);
            f.blob_sigma_beams = parse_number<double>(key, tokens[7]);
            config.fish.push_back(f);
        } else {
            fail(ErrorCode::Validation, "synth config line " + std::to_string(number) + ": unknown key '" + key + "'");
        }
    }
    config.validate();
    return config;
}

SynthConfig read_synth_config(const std::filesystem::path& path) {
    SynthConfig config = parse_synth_config(read_text_file(path));
    if (config.clip_id == "synth") config.clip_id = path.stem().string();
    return config;
}

std::string synth_config_to_text(const SynthConfig& c) {
    std::ostringstream out;
    out << std::setprecision(17);
    out << "clip_id = " << c.clip_id << "\n"
        << "frame_count = " << c.header.frame_count << "\n"
        << "range_samples = " << c.header.range_samples << "\n"
        << "beam_count = " << c.header.beam_count << "\n"
        << "frame_rate = " << c.header.frame_rate << "\n"
        << "window_start = " << c.header.window_start << "\n"
        << "window_end = " << c.header.window_end << "\n"
        << "beam_fov = " << c.header.beam_fov << "\n"
        << "upstream_side = " << to_string(c.header.upstream_side) << "\n"
        << "background_level = " << c.background_level << "\n"
        << "noise_sigma = " << c.noise_sigma << "\n"
        << "seed = " << c.seed << "\n"
        << "window = " << c.window << "\n";
    for (const SynthFish& f : c.fish)
        out << "fish = " << f.entry_frame << ' ' << f.speed << ' ' << f.entry_beam << ' ' << f.range_row
            << ' ' << f.range_drift << ' ' << f.peak_intensity << ' ' << f.blob_sigma_rows << ' '
            << f.blob_sigma_beams << "\n";
    return out.str();
}

} // namespace echokit
