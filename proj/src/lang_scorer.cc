#include <cmath>
#include <unordered_map>

#include "mtkit/cleaning.h"
#include "mtkit/language.h"
#include "mtkit/util.h"

namespace mtkit {

namespace {

// Seed text per language used to fit the fallback classifier. A few everyday
// sentences are enough to separate scripts and the common Latin-script
// languages; closely related pairs (ms/id) stay hard, which is why the
// scorer is pluggable.
struct SeedText {
  const char* lang;
  const char* text;
};

const SeedText kSeedTexts[] = {
    {"ar",
     "السلام عليكم ورحمة الله وبركاته. هذه جملة قصيرة باللغة العربية. تنتشر "
     "اللغة العربية في بلدان كثيرة حول العالم. أريد أن أذهب إلى المدينة غدا "
     "لشراء الخبز والفواكه الطازجة من السوق. "
     "يغادر القطار من المحطة في الساعة الثامنة صباحا. نلتقي بعد الظهر أمام المكتبة في وسط المدينة."},
    {"bn",
     "আমি বাংলায় কথা বলি। এটি বাংলা ভাষায় লেখা একটি ছোট বাক্য। বাংলা ভাষা "
     "পৃথিবীর বহু মানুষ ব্যবহার করে। আমি আগামীকাল সকালে শহরে গিয়ে রুটি কিনতে "
     "চাই। "
     "ট্রেনটি সকাল আটটায় স্টেশন থেকে ছেড়ে যায়। আমরা বিকেলে লাইব্রেরির সামনে দেখা করব।"},
    {"cs",
     "Dobrý den, jak se dnes máte? Toto je krátká věta v českém jazyce. "
     "Čeština se používá především v České republice. Zítra ráno bych chtěl "
     "jet do města a koupit čerstvý chléb a ovoce. "
     "Vlak odjíždí z nádraží v osm hodin ráno. Sejdeme se odpoledne před knihovnou ve městě."},
    {"de",
     "Guten Tag, wie geht es Ihnen heute? Dies ist ein kurzer Satz auf "
     "Deutsch. Die deutsche Sprache wird von vielen Menschen gesprochen. Ich "
     "möchte morgen früh in die Stadt fahren und frisches Brot kaufen. "
     "Der Zug fährt um acht Uhr morgens vom Bahnhof ab. Wir treffen uns am Nachmittag vor der Bibliothek."},
    {"en",
     "Hello, how are you doing today? This is a short sentence written in the "
     "English language. English is spoken by many people around the world. I "
     "would like to go into the city tomorrow morning and buy some fresh "
     "bread. "
     "The train departs from the station platform at half past eight in the morning. We will meet in front of the library in the afternoon, our usual time."},
    {"es",
     "Hola, ¿cómo está usted hoy? Esta es una frase corta escrita en español. "
     "El idioma español se habla en muchos países del mundo. Me gustaría ir a "
     "la ciudad mañana por la mañana y comprar pan fresco. "
     "El tren sale de la estación a las ocho de la mañana. Nos vemos por la tarde frente a la biblioteca."},
    {"fa",
     "سلام، حال شما امروز چطور است؟ این یک جمله کوتاه به زبان فارسی است. زبان "
     "فارسی در ایران و کشورهای دیگر صحبت می‌شود. می‌خواهم فردا صبح به شهر بروم "
     "و نان تازه بخرم. "
     "قطار ساعت هشت صبح از ایستگاه حرکت می‌کند. بعدازظهر جلوی کتابخانه همدیگر را می‌بینیم."},
    {"fr",
     "Bonjour, comment allez-vous aujourd'hui ? Ceci est une courte phrase en "
     "français. La langue française est parlée dans de nombreux pays. Je "
     "voudrais aller en ville demain matin et acheter du pain frais. "
     "Le train part de la gare à huit heures du matin. Nous nous retrouvons devant la bibliothèque dans l'après-midi."},
    {"he",
     "שלום, מה שלומך היום? זהו משפט קצר הכתוב בעברית. השפה העברית מדוברת "
     "בישראל ובקהילות רבות. אני רוצה לנסוע מחר בבוקר העירה ולקנות לחם טרי. "
     "הרכבת יוצאת מהתחנה בשמונה בבוקר. ניפגש אחר הצהריים מול הספרייה בעיר."},
    {"hi",
     "नमस्ते, आज आप कैसे हैं? यह हिंदी भाषा में लिखा गया एक छोटा वाक्य है। हिंदी "
     "भारत में करोड़ों लोग बोलते हैं। मैं कल सुबह शहर जाकर ताज़ी रोटी खरीदना "
     "चाहता हूँ। "
     "ट्रेन सुबह आठ बजे स्टेशन से निकलती है। हम दोपहर में पुस्तकालय के सामने मिलेंगे।"},
    {"id",
     "Selamat pagi, apa kabar Anda hari ini? Ini adalah kalimat pendek dalam "
     "bahasa Indonesia. Bahasa Indonesia digunakan oleh banyak orang di "
     "nusantara. Saya ingin pergi ke kota besok pagi untuk membeli roti "
     "segar. "
     "Kereta berangkat dari stasiun pukul delapan pagi. Kita bertemu di depan perpustakaan sore nanti."},
    {"it",
     "Buongiorno, come sta oggi? Questa è una breve frase scritta in "
     "italiano. La lingua italiana è parlata in Italia e altrove. Vorrei "
     "andare in città domani mattina a comprare del pane fresco. "
     "Il treno parte dalla stazione alle otto del mattino. Ci vediamo davanti alla biblioteca nel pomeriggio."},
    {"ja",
     "こんにちは、今日はお元気ですか。これは日本語で書かれた短い文です。日本語は日本で話されています。明日の朝、"
     "街へ行って新しいパンを買いたいです。 "
     "列車は朝八時に駅を出発します。午後に図書館の前で会いましょう。"},
    {"km",
     "សួស្តី តើអ្នកសុខសប្បាយជាទេថ្ងៃនេះ? នេះជាប្រយោគខ្លីសរសេរជាភាសាខ្មែរ។ "
     "ភាសាខ្មែរត្រូវបាននិយាយនៅក្នុងប្រទេសកម្ពុជា។ "
     "ខ្ញុំចង់ទៅទីក្រុងនៅព្រឹកស្អែកដើម្បីទិញនំប៉័ង។ "
     "រថភ្លើងចេញពីស្ថានីយនៅម៉ោងប្រាំបីព្រឹក។ យើងជួបគ្នានៅមុខបណ្ណាល័យនៅពេលរសៀល។"},
    {"ko",
     "안녕하세요, 오늘 어떻게 지내세요? 이것은 한국어로 쓰인 짧은 문장입니다. "
     "한국어는 한국에서 널리 사용됩니다. 내일 아침에 도시에 가서 신선한 빵을 "
     "사고 싶습니다. "
     "기차는 아침 여덟 시에 역에서 출발합니다. 오후에 도서관 앞에서 만납시다."},
    {"lo",
     "ສະບາຍດີ ມື້ນີ້ເຈົ້າສະບາຍດີບໍ? ນີ້ແມ່ນປະໂຫຍກສັ້ນທີ່ຂຽນເປັນພາສາລາວ. "
     "ພາສາລາວຖືກເວົ້າຢູ່ໃນປະເທດລາວ. ຂ້ອຍຢາກໄປຕົວເມືອງໃນຕອນເຊົ້າມື້ອື່ນເພື່ອຊື້ເຂົ້າຈີ່. "
     "ລົດໄຟອອກຈາກສະຖານີເວລາແປດໂມງເຊົ້າ. ພວກເຮົາພົບກັນຢູ່ໜ້າຫໍສະໝຸດຕອນບ່າຍ."},
    {"ms",
     "Selamat pagi, apa khabar anda hari ini? Ini ialah ayat pendek yang "
     "ditulis dalam bahasa Melayu. Bahasa Melayu dituturkan di Malaysia dan "
     "Brunei. Saya hendak pergi ke bandar esok pagi untuk membeli roti segar "
     "daripada kedai. "
     "Kereta api bertolak dari stesen pada pukul lapan pagi. Kita berjumpa di hadapan perpustakaan petang nanti."},
    {"my",
     "မင်္ဂလာပါ၊ ဒီနေ့ နေကောင်းပါသလား။ ဤသည်မှာ မြန်မာဘာသာဖြင့် ရေးသားထားသော "
     "တိုတောင်းသည့် ဝါကျဖြစ်သည်။ မြန်မာဘာသာကို မြန်မာနိုင်ငံတွင် "
     "ပြောဆိုကြသည်။ မနက်ဖြန် မြို့ထဲသွားပြီး ပေါင်မုန့်ဝယ်ချင်သည်။ "
     "ရထားသည် မနက်ရှစ်နာရီတွင် ဘူတာရုံမှ ထွက်ခွာသည်။ ညနေပိုင်းတွင် စာကြည့်တိုက်ရှေ့၌ တွေ့ကြမည်။"},
    {"nl",
     "Goedemorgen, hoe gaat het vandaag met u? Dit is een korte zin "
     "geschreven in het Nederlands. De Nederlandse taal wordt gesproken in "
     "Nederland en België. Ik wil morgenochtend naar de stad gaan om vers "
     "brood te kopen. "
     "De trein vertrekt om acht uur 's ochtends van het station. We zien elkaar in de middag voor de bibliotheek."},
    {"pl",
     "Dzień dobry, jak się pan dzisiaj miewa? To jest krótkie zdanie napisane "
     "w języku polskim. Język polski jest używany w Polsce. Chciałbym jutro "
     "rano pojechać do miasta i kupić świeży chleb. "
     "Pociąg odjeżdża ze stacji o ósmej rano. Spotkamy się po południu przed biblioteką w mieście."},
    {"pt",
     "Bom dia, como está você hoje? Esta é uma frase curta escrita em "
     "português. A língua portuguesa é falada no Brasil e em Portugal. Eu "
     "gostaria de ir à cidade amanhã de manhã para comprar pão fresco. "
     "O trem parte da estação às oito da manhã. Nos encontramos em frente à biblioteca à tarde."},
    {"ru",
     "Здравствуйте, как у вас сегодня дела? Это короткое предложение, "
     "написанное на русском языке. Русский язык распространён во многих "
     "странах. Я хотел бы завтра утром поехать в город и купить свежий хлеб. "
     "Поезд отправляется со станции в восемь часов утра. Встретимся после обеда перед библиотекой."},
    {"th",
     "สวัสดีครับ วันนี้สบายดีไหม นี่คือประโยคสั้นที่เขียนเป็นภาษาไทย "
     "ภาษาไทยใช้พูดกันในประเทศไทย พรุ่งนี้เช้าฉันอยากไปในเมืองเพื่อซื้อขนมปังสด "
     "รถไฟออกจากสถานีเวลาแปดโมงเช้า เราจะพบกันหน้าห้องสมุดตอนบ่าย"},
    {"tl",
     "Magandang umaga, kumusta ka ngayon? Ito ay isang maikling pangungusap "
     "na isinulat sa wikang Tagalog. Ang Tagalog ay sinasalita sa Pilipinas. "
     "Gusto kong pumunta sa lungsod bukas ng umaga upang bumili ng sariwang "
     "tinapay. "
     "Aalis ang tren mula sa istasyon nang alas otso ng umaga. Magkita tayo sa harap ng aklatan sa hapon."},
    {"tr",
     "Günaydın, bugün nasılsınız? Bu Türkçe yazılmış kısa bir cümledir. "
     "Türkçe Türkiye'de ve başka yerlerde konuşulur. Yarın sabah şehre gidip "
     "taze ekmek almak istiyorum. "
     "Tren sabah saat sekizde istasyondan kalkıyor. Öğleden sonra kütüphanenin önünde buluşalım."},
    {"ur",
     "السلام علیکم، آج آپ کیسے ہیں؟ یہ اردو زبان میں لکھا گیا ایک مختصر جملہ "
     "ہے۔ اردو پاکستان اور بھارت میں بولی جاتی ہے۔ میں کل صبح شہر جا کر تازہ "
     "روٹی خریدنا چاہتا ہوں۔ "
     "ٹرین صبح آٹھ بجے اسٹیشن سے روانہ ہوتی ہے۔ ہم دوپہر کے بعد کتب خانے کے سامنے ملیں گے۔"},
    {"vi",
     "Xin chào, hôm nay bạn có khỏe không? Đây là một câu ngắn được viết bằng "
     "tiếng Việt. Tiếng Việt được nói ở Việt Nam. Tôi muốn đi vào thành phố "
     "sáng mai để mua bánh mì tươi. "
     "Tàu rời ga lúc tám giờ sáng. Chúng ta gặp nhau trước thư viện vào buổi chiều."},
    {"zh",
     "你好，你今天过得怎么样？这是一个用中文写成的简短句子。中文在世界上被许多人使用。我想明天早上去城里买一些新鲜的面包。 "
     "火车早上八点从车站出发。我们下午在图书馆前面见面。"},
};

uint64_t mix(uint64_t h, uint64_t v) {
  h ^= v + 0x9E3779B97F4A7C15ull + (h << 6) + (h >> 2);
  return h * 0xFF51AFD7ED558CCDull;
}

std::vector<uint64_t> ngrams_of(std::string_view text) {
  // Hashed codepoint n-grams for n = 1..3.
  std::vector<uint64_t> grams;
  auto cps = to_codepoints(text);
  // Case-insensitive over ASCII keeps the Latin profiles small.
  for (auto& c : cps)
    if (c >= 'A' && c <= 'Z') c += 'a' - 'A';
  for (size_t i = 0; i < cps.size(); ++i) {
    uint64_t h = mix(0x243F6A8885A308D3ull, cps[i]);
    grams.push_back(mix(h, 1));
    if (i + 1 < cps.size()) {
      h = mix(h, cps[i + 1]);
      grams.push_back(mix(h, 2));
      if (i + 2 < cps.size()) grams.push_back(mix(mix(h, cps[i + 2]), 3));
    }
  }
  return grams;
}

}  // namespace

struct NgramLangScorer::Profile {
  std::string lang;
  std::unordered_map<uint64_t, double> log_prob;
  double log_prob_unseen = 0.0;
};

NgramLangScorer::NgramLangScorer() {
  auto profiles = std::make_shared<std::vector<Profile>>();
  for (const auto& seed : kSeedTexts) {
    Profile p;
    p.lang = seed.lang;
    std::unordered_map<uint64_t, int64_t> counts;
    for (uint64_t g : ngrams_of(seed.text)) ++counts[g];
    int64_t total = 0;
    for (const auto& [g, c] : counts) total += c;
    // Add-one smoothing with a fixed virtual alphabet so the unseen mass is
    // comparable across languages.
    const double denom = static_cast<double>(total) + 1e6;
    for (const auto& [g, c] : counts)
      p.log_prob[g] = std::log((static_cast<double>(c) + 1.0) / denom);
    p.log_prob_unseen = std::log(1.0 / denom);
    profiles->push_back(std::move(p));
  }
  profiles_ = std::move(profiles);
}

std::pair<std::string, double> NgramLangScorer::classify(
    std::string_view text) const {
  const auto grams = ngrams_of(text);
  const auto& profiles = *profiles_;
  std::vector<double> loglik(profiles.size(), 0.0);
  for (size_t i = 0; i < profiles.size(); ++i) {
    const auto& p = profiles[i];
    double ll = 0.0;
    for (uint64_t g : grams) {
      auto it = p.log_prob.find(g);
      ll += it != p.log_prob.end() ? it->second : p.log_prob_unseen;
    }
    loglik[i] = ll;
  }
  size_t best = 0;
  for (size_t i = 1; i < profiles.size(); ++i)
    if (loglik[i] > loglik[best]) best = i;
  // Posterior under a uniform prior; evidence accumulates over the text, so
  // any clearly scripted sentence saturates while short or ambiguous input
  // stays uncertain.
  double z = 0.0;
  for (double v : loglik) z += std::exp(v - loglik[best]);
  return {profiles[best].lang, 1.0 / z};
}

}  // namespace mtkit
