#include "fashsent/text_clean.hpp"

#include <algorithm>
#include <array>
#include <utility>

namespace fashsent {

namespace {

// Sorted by codepoint for binary search. Names follow the Unicode short
// names, lowercased with underscores.
constexpr std::pair<char32_t, const char*> kEmojiTable[] = {
    {0x2600, "sun"},
    {0x2601, "cloud"},
    {0x260E, "telephone"},
    {0x2614, "umbrella_with_rain_drops"},
    {0x2615, "hot_beverage"},
    {0x2620, "skull_and_crossbones"},
    {0x262E, "peace_symbol"},
    {0x263A, "smiling_face"},
    {0x2648, "aries"},
    {0x2660, "spade_suit"},
    {0x2665, "heart_suit"},
    {0x266B, "musical_notes"},
    {0x267B, "recycling_symbol"},
    {0x26A0, "warning"},
    {0x26A1, "high_voltage"},
    {0x26BD, "soccer_ball"},
    {0x26C4, "snowman"},
    {0x26C5, "sun_behind_cloud"},
    {0x2702, "scissors"},
    {0x2705, "check_mark_button"},
    {0x2708, "airplane"},
    {0x2709, "envelope"},
    {0x270A, "raised_fist"},
    {0x270B, "raised_hand"},
    {0x270C, "victory_hand"},
    {0x270F, "pencil"},
    {0x2714, "check_mark"},
    {0x2728, "sparkles"},
    {0x2744, "snowflake"},
    {0x274C, "cross_mark"},
    {0x2753, "question_mark"},
    {0x2757, "exclamation_mark"},
    {0x2763, "heart_exclamation"},
    {0x2764, "red_heart"},
    {0x27A1, "right_arrow"},
    {0x2B05, "left_arrow"},
    {0x2B06, "up_arrow"},
    {0x2B07, "down_arrow"},
    {0x2B50, "star"},
    {0x1F193, "free_button"},
    {0x1F195, "new_button"},
    {0x1F308, "rainbow"},
    {0x1F30A, "water_wave"},
    {0x1F315, "full_moon"},
    {0x1F319, "crescent_moon"},
    {0x1F31E, "sun_with_face"},
    {0x1F31F, "glowing_star"},
    {0x1F332, "evergreen_tree"},
    {0x1F334, "palm_tree"},
    {0x1F335, "cactus"},
    {0x1F337, "tulip"},
    {0x1F338, "cherry_blossom"},
    {0x1F339, "rose"},
    {0x1F33A, "hibiscus"},
    {0x1F33B, "sunflower"},
    {0x1F33F, "herb"},
    {0x1F340, "four_leaf_clover"},
    {0x1F341, "maple_leaf"},
    {0x1F343, "leaf_fluttering_in_wind"},
    {0x1F346, "eggplant"},
    {0x1F34E, "red_apple"},
    {0x1F351, "peach"},
    {0x1F353, "strawberry"},
    {0x1F354, "hamburger"},
    {0x1F355, "pizza"},
    {0x1F35F, "french_fries"},
    {0x1F366, "soft_ice_cream"},
    {0x1F377, "wine_glass"},
    {0x1F378, "cocktail_glass"},
    {0x1F37A, "beer_mug"},
    {0x1F381, "wrapped_gift"},
    {0x1F382, "birthday_cake"},
    {0x1F386, "fireworks"},
    {0x1F388, "balloon"},
    {0x1F389, "party_popper"},
    {0x1F38A, "confetti_ball"},
    {0x1F393, "graduation_cap"},
    {0x1F3A4, "microphone"},
    {0x1F3A8, "artist_palette"},
    {0x1F3A9, "top_hat"},
    {0x1F3AF, "bullseye"},
    {0x1F3B5, "musical_note"},
    {0x1F3B6, "beamed_musical_notes"},
    {0x1F3C0, "basketball"},
    {0x1F3C6, "trophy"},
    {0x1F425, "baby_chick"},
    {0x1F431, "cat_face"},
    {0x1F436, "dog_face"},
    {0x1F44A, "oncoming_fist"},
    {0x1F44B, "waving_hand"},
    {0x1F44C, "ok_hand"},
    {0x1F44D, "thumbs_up"},
    {0x1F44E, "thumbs_down"},
    {0x1F44F, "clapping_hands"},
    {0x1F450, "open_hands"},
    {0x1F451, "crown"},
    {0x1F452, "womans_hat"},
    {0x1F453, "glasses"},
    {0x1F454, "necktie"},
    {0x1F455, "t_shirt"},
    {0x1F456, "jeans"},
    {0x1F457, "dress"},
    {0x1F458, "kimono"},
    {0x1F459, "bikini"},
    {0x1F45A, "womans_clothes"},
    {0x1F45B, "purse"},
    {0x1F45C, "handbag"},
    {0x1F45D, "clutch_bag"},
    {0x1F45E, "mans_shoe"},
    {0x1F45F, "running_shoe"},
    {0x1F460, "high_heeled_shoe"},
    {0x1F461, "womans_sandal"},
    {0x1F462, "womans_boot"},
    {0x1F480, "skull"},
    {0x1F484, "lipstick"},
    {0x1F485, "nail_polish"},
    {0x1F48B, "kiss_mark"},
    {0x1F48C, "love_letter"},
    {0x1F48D, "ring"},
    {0x1F48E, "gem_stone"},
    {0x1F494, "broken_heart"},
    {0x1F495, "two_hearts"},
    {0x1F496, "sparkling_heart"},
    {0x1F497, "growing_heart"},
    {0x1F498, "heart_with_arrow"},
    {0x1F499, "blue_heart"},
    {0x1F49A, "green_heart"},
    {0x1F49B, "yellow_heart"},
    {0x1F49C, "purple_heart"},
    {0x1F49D, "heart_with_ribbon"},
    {0x1F49E, "revolving_hearts"},
    {0x1F49F, "heart_decoration"},
    {0x1F4A1, "light_bulb"},
    {0x1F4A2, "anger_symbol"},
    {0x1F4A4, "zzz"},
    {0x1F4A5, "collision"},
    {0x1F4A6, "sweat_droplets"},
    {0x1F4A8, "dashing_away"},
    {0x1F4A9, "pile_of_poo"},
    {0x1F4AA, "flexed_biceps"},
    {0x1F4AB, "dizzy_symbol"},
    {0x1F4AF, "hundred_points"},
    {0x1F4B0, "money_bag"},
    {0x1F4B5, "dollar_banknote"},
    {0x1F4B8, "money_with_wings"},
    {0x1F4BB, "laptop"},
    {0x1F4C8, "chart_increasing"},
    {0x1F4C9, "chart_decreasing"},
    {0x1F4CC, "pushpin"},
    {0x1F4CD, "round_pushpin"},
    {0x1F4E2, "loudspeaker"},
    {0x1F4F1, "mobile_phone"},
    {0x1F4F7, "camera"},
    {0x1F4F8, "camera_with_flash"},
    {0x1F511, "key"},
    {0x1F512, "locked"},
    {0x1F514, "bell"},
    {0x1F51D, "top_arrow"},
    {0x1F525, "fire"},
    {0x1F576, "dark_sunglasses"},
    {0x1F5A4, "black_heart"},
    {0x1F600, "grinning_face"},
    {0x1F601, "beaming_face_with_smiling_eyes"},
    {0x1F602, "face_with_tears_of_joy"},
    {0x1F603, "grinning_face_with_big_eyes"},
    {0x1F604, "grinning_face_with_smiling_eyes"},
    {0x1F605, "grinning_face_with_sweat"},
    {0x1F606, "grinning_squinting_face"},
    {0x1F607, "smiling_face_with_halo"},
    {0x1F608, "smiling_face_with_horns"},
    {0x1F609, "winking_face"},
    {0x1F60A, "smiling_face_with_smiling_eyes"},
    {0x1F60B, "face_savoring_food"},
    {0x1F60C, "relieved_face"},
    {0x1F60D, "smiling_face_with_heart_eyes"},
    {0x1F60E, "smiling_face_with_sunglasses"},
    {0x1F60F, "smirking_face"},
    {0x1F610, "neutral_face"},
    {0x1F611, "expressionless_face"},
    {0x1F612, "unamused_face"},
    {0x1F613, "downcast_face_with_sweat"},
    {0x1F614, "pensive_face"},
    {0x1F615, "confused_face"},
    {0x1F616, "confounded_face"},
    {0x1F617, "kissing_face"},
    {0x1F618, "face_blowing_a_kiss"},
    {0x1F619, "kissing_face_with_smiling_eyes"},
    {0x1F61A, "kissing_face_with_closed_eyes"},
    {0x1F61B, "face_with_tongue"},
    {0x1F61C, "winking_face_with_tongue"},
    {0x1F61D, "squinting_face_with_tongue"},
    {0x1F61E, "disappointed_face"},
    {0x1F61F, "worried_face"},
    {0x1F620, "angry_face"},
    {0x1F621, "enraged_face"},
    {0x1F622, "crying_face"},
    {0x1F623, "persevering_face"},
    {0x1F624, "face_with_steam_from_nose"},
    {0x1F625, "sad_but_relieved_face"},
    {0x1F626, "frowning_face_with_open_mouth"},
    {0x1F627, "anguished_face"},
    {0x1F628, "fearful_face"},
    {0x1F629, "weary_face"},
    {0x1F62A, "sleepy_face"},
    {0x1F62B, "tired_face"},
    {0x1F62C, "grimacing_face"},
    {0x1F62D, "loudly_crying_face"},
    {0x1F62E, "face_with_open_mouth"},
    {0x1F62F, "hushed_face"},
    {0x1F630, "anxious_face_with_sweat"},
    {0x1F631, "face_screaming_in_fear"},
    {0x1F632, "astonished_face"},
    {0x1F633, "flushed_face"},
    {0x1F634, "sleeping_face"},
    {0x1F635, "face_with_crossed_out_eyes"},
    {0x1F636, "face_without_mouth"},
    {0x1F637, "face_with_medical_mask"},
    {0x1F641, "slightly_frowning_face"},
    {0x1F642, "slightly_smiling_face"},
    {0x1F643, "upside_down_face"},
    {0x1F644, "face_with_rolling_eyes"},
    {0x1F645, "person_gesturing_no"},
    {0x1F646, "person_gesturing_ok"},
    {0x1F647, "person_bowing"},
    {0x1F648, "see_no_evil_monkey"},
    {0x1F649, "hear_no_evil_monkey"},
    {0x1F64A, "speak_no_evil_monkey"},
    {0x1F64B, "person_raising_hand"},
    {0x1F64C, "raising_hands"},
    {0x1F64D, "person_frowning"},
    {0x1F64E, "person_pouting"},
    {0x1F64F, "folded_hands"},
    {0x1F680, "rocket"},
    {0x1F697, "automobile"},
    {0x1F6A8, "police_car_light"},
    {0x1F6CD, "shopping_bags"},
    {0x1F6D2, "shopping_cart"},
    {0x1F90D, "white_heart"},
    {0x1F90E, "brown_heart"},
    {0x1F910, "zipper_mouth_face"},
    {0x1F911, "money_mouth_face"},
    {0x1F912, "face_with_thermometer"},
    {0x1F913, "nerd_face"},
    {0x1F914, "thinking_face"},
    {0x1F915, "face_with_head_bandage"},
    {0x1F916, "robot"},
    {0x1F917, "smiling_face_with_open_hands"},
    {0x1F918, "sign_of_the_horns"},
    {0x1F919, "call_me_hand"},
    {0x1F91D, "handshake"},
    {0x1F91E, "crossed_fingers"},
    {0x1F920, "cowboy_hat_face"},
    {0x1F921, "clown_face"},
    {0x1F922, "nauseated_face"},
    {0x1F923, "rolling_on_the_floor_laughing"},
    {0x1F924, "drooling_face"},
    {0x1F925, "lying_face"},
    {0x1F926, "person_facepalming"},
    {0x1F927, "sneezing_face"},
    {0x1F928, "face_with_raised_eyebrow"},
    {0x1F929, "star_struck"},
    {0x1F92A, "zany_face"},
    {0x1F92B, "shushing_face"},
    {0x1F92C, "face_with_symbols_on_mouth"},
    {0x1F92D, "face_with_hand_over_mouth"},
    {0x1F92E, "face_vomiting"},
    {0x1F92F, "exploding_head"},
    {0x1F970, "smiling_face_with_hearts"},
    {0x1F971, "yawning_face"},
    {0x1F972, "smiling_face_with_tear"},
    {0x1F973, "partying_face"},
    {0x1F974, "woozy_face"},
    {0x1F975, "hot_face"},
    {0x1F976, "cold_face"},
    {0x1F97A, "pleading_face"},
    {0x1F97B, "sari"},
    {0x1F97C, "lab_coat"},
    {0x1F97D, "goggles"},
    {0x1F97E, "hiking_boot"},
    {0x1F97F, "flat_shoe"},
    {0x1F984, "unicorn"},
    {0x1F98B, "butterfly"},
    {0x1F9D0, "face_with_monocle"},
    {0x1F9E1, "orange_heart"},
    {0x1F9E3, "scarf"},
    {0x1F9E4, "gloves"},
    {0x1F9E5, "coat"},
    {0x1F9E6, "socks"},
    {0x1F9F5, "thread"},
    {0x1F9F6, "yarn"},
    {0x1FA70, "ballet_shoes"},
    {0x1FA71, "one_piece_swimsuit"},
    {0x1FA73, "shorts"},
    {0x1FA74, "thong_sandal"},
};

} // namespace

const char* emoji_token(char32_t cp) {
    auto it = std::lower_bound(std::begin(kEmojiTable), std::end(kEmojiTable), cp,
                               [](const auto& entry, char32_t c) { return entry.first < c; });
    if (it != std::end(kEmojiTable) && it->first == cp) return it->second;
    return nullptr;
}

bool is_emoji_codepoint(char32_t cp) {
    if (cp >= 0x1F000 && cp <= 0x1FFFF) return true; // pictographs, flags, extended
    if (cp >= 0x2600 && cp <= 0x27BF) return true;   // misc symbols, dingbats
    if (cp >= 0x2B00 && cp <= 0x2BFF) return true;   // misc symbols and arrows
    if (cp >= 0x2300 && cp <= 0x23FF) return true;   // misc technical (watch, alarm clock)
    if (cp >= 0xFE00 && cp <= 0xFE0F) return true;   // variation selectors
    if (cp == 0x200D) return true;                   // zero-width joiner
    if (cp >= 0x1F1E6 && cp <= 0x1F1FF) return true; // regional indicators
    return false;
}

std::size_t emoji_table_size() { return std::size(kEmojiTable); }

} // namespace fashsent
