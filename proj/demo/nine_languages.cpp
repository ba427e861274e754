// Plans and renders one utterance spanning nine languages with the mock
// engine, then reports each voice switch and the measured pauses.
//
//   nine_languages [out.wav]

#include <cstdio>
#include <iostream>
#include <memory>
#include <string>

#include "cstts/cstts.hpp"

int main(int argc, char** argv) {
  const std::string text =
      "Hello everyone, welcome to the show. नमस\u094Dत\u0947 आप क\u0948स\u0947 ह\u0948\u0902? ನಮಸ\u0CCDಕ\u0CBEರ ಹ\u0CC7ಗ\u0CBFದ\u0CCDದ\u0CC0ರ\u0CBF? "
      "నమస\u0C4Dక\u0C3Eర\u0C02 మ\u0C40ర\u0C41 ఎల\u0C3E ఉన\u0C4Dన\u0C3Eర\u0C41? নমস\u09CDক\u09BEর আপন\u09BF ক\u09C7মন আছ\u09C7ন? નમસ\u0ACDત\u0AC7 તમ\u0AC7 ક\u0AC7મ છ\u0ACB? "
      "Wie geht es dir heute? 你好，你今天怎么样？ こんにちは、お元気ですか？";

  cstts::UserPrefs prefs;
  prefs.switch_threshold_words = 0;  // every language gets its native voice
  prefs.max_voices = 0;

  try {
    const cstts::Pipeline pipeline;
    const cstts::EngineSet engines(std::make_shared<cstts::MockEngine>());
    const auto result = pipeline.run(text, prefs, engines);

    for (const auto& e : result.plan.entries) {
      std::printf("%-4s %-8s %-22s %4d ms  %s\n", e.lang.str().c_str(), e.locale.str().c_str(), e.voice.id.c_str(),
                  e.pause_before_ms, e.segment.text.c_str());
    }
    const auto pauses = cstts::measure_pauses(result.audio);
    std::printf("\n%.3f s of audio, %zu pauses\n", result.audio.duration_s(), pauses.size());
    for (const auto& t : result.timings) std::printf("  %-11s %.3f ms\n", t.stage.c_str(), t.ms);

    if (argc > 1) {
      cstts::write_wav_file(argv[1], result.audio);
      std::printf("wrote %s\n", argv[1]);
    }
  } catch (const cstts::Error& e) {
    std::cerr << cstts::error_to_json(e).dump() << "\n";
    return 1;
  }
  return 0;
}
