#pragma once

// Topic material for the synthetic corpora. Clauses are first-person and
// lowercase; second-person forms are derived mechanically.

#include <string_view>
#include <vector>

namespace verve::corpus::synth {

struct Topic {
  std::string_view name;
  std::vector<std::string_view> situations;
  std::vector<std::string_view> outcomes;
  std::vector<std::string_view> beliefs;
  std::vector<std::string_view> feelings;  // adjectives
  std::vector<std::string_view> concerns;  // second person
  std::vector<std::string_view> advice;    // bare infinitive phrases
  std::vector<std::string_view> questions; // wh-questions without "?"
};

inline const std::vector<Topic>& topics() {
  static const std::vector<Topic> t{
      {"diet",
       {"i have given up all unhealthy food", "i cut out sugar and bread last month",
        "i have been counting every calorie", "i skip dinner most nights",
        "i joined a gym and go four times a week", "i tried three different diets this year",
        "i only eat salads for lunch", "my mom says i can't eat anything after dinner"},
       {"i still can't lose any weight", "the scale has not moved at all",
        "i gained back everything i lost", "i end up binge eating on weekends",
        "i feel hungry all the time", "my clothes still don't fit"},
       {"dieting just doesn't work for me", "my body is broken",
        "i will always be overweight", "there is no point in trying anymore",
        "i have no willpower", "everyone else has it easier"},
       {"frustrated", "discouraged", "defeated", "hopeless"},
       {"all your hard work is going to waste", "you might never reach a healthy weight",
        "nothing you try will ever make a difference", "you're letting yourself down"},
       {"keep a food journal", "talk to a dietitian", "try a different meal plan",
        "weigh yourself less often", "eat more protein", "focus on smaller goals"},
       {"how much weight do you want to lose", "what have you been eating lately",
        "when did you start this diet", "how often do you exercise"}},
      {"smoking",
       {"i have tried to quit smoking five times", "i smoke a pack a day",
        "i started smoking again after my divorce", "i switched to vaping last year",
        "my doctor told me to stop smoking", "i smoke whenever i get stressed at work",
        "i only smoke when i drink with friends", "my kids beg me to quit"},
       {"i always end up buying another pack", "the cravings never go away",
        "i get really irritable without cigarettes", "i relapse after a few days",
        "my cough keeps getting worse", "i can't sleep when i try to stop"},
       {"i will never be able to quit", "smoking is the only thing that calms me down",
        "it's too late to repair the damage", "quitting is harder for me than for others",
        "i'm just a smoker and that won't change", "my family is disappointed in me"},
       {"ashamed", "stuck", "worried", "torn"},
       {"you'll never break free of cigarettes", "your health is already damaged",
        "you're failing your kids", "you'll lose the one thing that helps you cope"},
       {"use nicotine patches", "set a quit date", "call a quit line", "try chewing gum instead",
        "avoid places where people smoke", "ask your doctor about medication"},
       {"how many cigarettes do you smoke a day", "when did you start smoking",
        "what happens when you try to quit", "who else in your house smokes"}},
      {"drinking",
       {"i drink a bottle of wine every night", "i got a second dui last month",
        "my wife says i drink too much", "i drink to fall asleep",
        "i have been drinking more since i lost my job", "i missed work twice because of hangovers",
        "i only drink on weekends but i drink a lot", "i stopped drinking for a week"},
       {"i can't relax without a drink", "my wife is threatening to leave",
        "i don't remember parts of the night", "i feel shaky in the morning",
        "my drinking keeps getting worse", "i go right back to it"},
       {"i don't really have a problem", "alcohol is the only thing that helps me sleep",
        "everyone drinks as much as i do", "i could stop if i really wanted to",
        "my family is overreacting", "i'm not ready to give it up"},
       {"conflicted", "defensive", "scared", "overwhelmed"},
       {"you could lose your marriage", "drinking is starting to control your life",
        "you won't be able to cope without alcohol", "people are judging you unfairly"},
       {"go to an aa meeting", "stop keeping alcohol at home", "see a counselor about your drinking",
        "track how much you drink", "find another way to unwind", "tell your wife how you feel"},
       {"how many drinks do you have a night", "when did you have your last drink",
        "what does your wife say about it", "how long have you been drinking like this"}},
      {"exercise",
       {"i signed up for a gym membership in january", "i used to run every morning",
        "my doctor wants me to walk thirty minutes a day", "i bought a treadmill last year",
        "i hurt my knee playing soccer", "i work twelve hour shifts",
        "i tried a yoga class once", "my friends all go hiking on weekends"},
       {"i haven't been in months", "the treadmill is just collecting dust",
        "i get out of breath climbing stairs", "i'm too tired after work to do anything",
        "i can't keep a routine going", "i stopped after two weeks"},
       {"i'm just a lazy person", "exercise is not for people like me",
        "i don't have time to take care of myself", "i will never get back in shape",
        "it's pointless if i can't do it every day", "my body just can't handle it anymore"},
       {"exhausted", "embarrassed", "disappointed", "discouraged"},
       {"you're falling behind everyone else", "your health will keep getting worse",
        "you've lost the person you used to be", "you'll never find the energy"},
       {"start with short walks", "find a workout buddy", "schedule exercise like an appointment",
        "try exercising in the morning", "join a beginner class", "set a small weekly goal"},
       {"what kind of exercise do you enjoy", "when do you usually have free time",
        "how often did you go to the gym", "what stops you from going"}},
      {"work",
       {"my boss keeps piling more work on me", "i work late every night",
        "i got passed over for a promotion", "i answer emails all weekend",
        "i have two deadlines this friday", "my coworker takes credit for my ideas",
        "i started a new job three months ago", "i have been thinking about quitting my job"},
       {"i can't keep up with everything", "i never see my kids anymore",
        "i can't sleep because i keep thinking about work", "i snap at my family when i get home",
        "nobody notices how hard i work", "my headaches keep getting worse"},
       {"i'm not good enough for this job", "if i say no i'll get fired",
        "i have to do everything myself", "things will never change at this company",
        "i'm wasting my life", "i can't afford to leave"},
       {"overwhelmed", "resentful", "exhausted", "trapped"},
       {"you're losing time with your family", "your work is never appreciated",
        "you'll burn out completely", "you don't have any control over your future"},
       {"talk to your boss", "set boundaries around email", "look for another job",
        "take a day off", "make a list of priorities", "ask for help with the project"},
       {"how many hours do you work a week", "what does your boss expect from you",
        "when was your last vacation", "what would you like to change at work"}},
      {"sleep",
       {"i lie awake until three in the morning", "i drink coffee all afternoon",
        "i scroll on my phone in bed", "i take sleeping pills most nights",
        "i wake up every two hours", "my partner snores loudly",
        "i nap for hours after work", "i work the night shift"},
       {"i'm exhausted all day", "i can barely focus at work", "i fell asleep while driving",
        "i'm irritable with everyone", "the pills don't work anymore", "i feel like a zombie"},
       {"i will never sleep normally again", "something is wrong with my brain",
        "there is nothing i can do about it", "i need the pills to function",
        "i'm just not a sleeper", "sleep is a waste of time"},
       {"drained", "anxious", "desperate", "frustrated"},
       {"you'll never feel rested again", "your exhaustion is hurting your job",
        "you're depending on pills too much", "you're running out of options"},
       {"stop drinking coffee after noon", "put your phone away before bed",
        "keep a regular bedtime", "talk to a sleep specialist",
        "try a relaxation exercise", "make your bedroom darker"},
       {"what time do you go to bed", "how much coffee do you drink",
        "how long have you had trouble sleeping", "what do you do when you can't sleep"}},
      {"family",
       {"my teenage son won't talk to me", "my sister and i haven't spoken in a year",
        "my parents are getting divorced", "my husband and i argue every night",
        "my mother moved in with us", "my daughter dropped out of college",
        "i missed my brother's wedding", "my father never says he's proud of me"},
       {"the house feels tense all the time", "i cry in the car after every visit",
        "every conversation turns into a fight", "i feel like a stranger in my own home",
        "i can't stop thinking about it", "nobody asks how i'm doing"},
       {"it's all my fault", "i'm a terrible parent", "we will never be close again",
        "i have to keep the peace no matter what", "they don't care about me",
        "i should just stay out of it"},
       {"heartbroken", "lonely", "guilty", "hurt"},
       {"you're losing your family", "you've failed as a parent",
        "nobody is there for you", "the distance will only grow"},
       {"try family counseling", "write your son a letter", "set aside time to talk",
        "take a break from the arguments", "call your sister", "ask your husband for support"},
       {"when did things start to change", "how often do you see them",
        "what do you argue about", "who else in the family knows"}},
      {"medication",
       {"i stopped taking my blood pressure pills", "i forget my insulin shots",
        "my doctor put me on antidepressants", "i skip my medication when i feel fine",
        "the side effects make me dizzy", "i take my pills only when i remember",
        "i ran out of my prescription last week", "i don't trust the new medication"},
       {"my blood sugar keeps spiking", "i ended up in the emergency room",
        "i feel foggy all the time", "my doctor is frustrated with me",
        "my symptoms came back", "i feel worse than before"},
       {"i don't really need medicine", "pills are for weak people",
        "the doctors don't know what they're doing", "i can handle this on my own",
        "the medicine is worse than the illness", "i'll be on pills forever"},
       {"skeptical", "afraid", "resentful", "uneasy"},
       {"you're losing control of your own body", "the medicine is changing who you are",
        "nobody is listening to your concerns", "your health is slipping away"},
       {"use a pill organizer", "set a reminder on your phone", "ask about a different medication",
        "talk to your pharmacist", "write down your side effects", "keep your pills by the sink"},
       {"which medications are you taking", "when did you stop taking them",
        "what side effects have you noticed", "how often do you miss a dose"}},
      {"school",
       {"i failed two classes last semester", "i stay up all night before exams",
        "my parents expect straight a's", "i skip class to play video games",
        "i switched majors three times", "i have a huge paper due monday",
        "i work two jobs while going to school", "my advisor wants me to drop a class"},
       {"my grades keep dropping", "i freeze during every test", "i'm behind on every assignment",
        "i can't concentrate on anything", "i might lose my scholarship", "i feel like a fraud"},
       {"i'm not smart enough for college", "my parents will be ashamed of me",
        "i should just drop out", "everyone else has it figured out",
        "i will never catch up", "nothing i do is good enough"},
       {"panicked", "inadequate", "pressured", "lost"},
       {"you're disappointing your parents", "you're not cut out for college",
        "your future is slipping away", "you're falling behind your friends"},
       {"go to the tutoring center", "make a study schedule", "talk to your professor",
        "cut back your work hours", "start the paper early", "join a study group"},
       {"which classes are hardest for you", "how many hours do you study",
        "what do your parents say about your grades", "when is your next exam"}},
      {"money",
       {"i have twenty thousand dollars in credit card debt", "i lost my job in march",
        "i keep buying things i don't need", "i borrowed money from my brother",
        "i haven't paid rent in two months", "my car needs repairs i can't afford",
        "i gamble on sports every weekend", "i send money to my parents every month"},
       {"the bills keep piling up", "i lie awake worrying about money",
        "the collectors call every day", "i hide my spending from my wife",
        "i can't save anything", "i might lose the apartment"},
       {"i'm terrible with money", "i will never get out of debt",
        "i have to take care of everyone", "it's too late to fix this",
        "money problems run in my family", "i don't deserve nice things"},
       {"ashamed", "panicked", "overwhelmed", "trapped"},
       {"you're losing control of your finances", "your family will find out",
        "you'll never feel secure", "you're carrying everyone else's burden"},
       {"make a budget", "talk to a financial counselor", "cut up your credit cards",
        "call the landlord", "sell the things you don't use", "set up automatic savings"},
       {"how much do you owe", "what are your biggest expenses", "who else knows about the debt",
        "when is the rent due"}},
      {"loneliness",
       {"i moved to a new city last year", "my best friend stopped calling me",
        "i spend every weekend alone", "my husband died two years ago",
        "i work from home and never see anyone", "all my friends have kids now",
        "i left my church after the argument", "i retired in the spring"},
       {"i don't have anyone to talk to", "the days feel so long",
        "i eat dinner in front of the tv every night", "i stopped going out at all",
        "i feel invisible", "i talk to my dog more than people"},
       {"nobody wants to be around me", "i'm too old to make new friends",
        "it's easier to just stay home", "people always leave me",
        "i'm better off alone", "there is something wrong with me"},
       {"isolated", "rejected", "sad", "empty"},
       {"you'll always be alone", "people don't value you",
        "you've lost your sense of belonging", "the best part of your life is over"},
       {"join a club", "volunteer in your community", "call an old friend",
        "take a class", "invite a neighbor for coffee", "try an online support group"},
       {"who do you talk to during the week", "what did you enjoy doing before",
        "when did you last see a friend", "how do you spend your evenings"}},
      {"anxiety",
       {"i have panic attacks at the grocery store", "i avoid driving on the highway",
        "i check the locks ten times before bed", "i cancel plans at the last minute",
        "my heart races before every meeting", "i worry about my kids all day",
        "i stopped taking the bus", "i rehearse every conversation in my head"},
       {"i can't leave the house some days", "my chest gets tight",
        "i feel like i'm going to die", "my friends stopped inviting me",
        "i can't turn my thoughts off", "i'm missing out on my life"},
       {"i'm going crazy", "something terrible is going to happen",
        "i will never be normal", "i can't trust my own body",
        "it's safer to avoid everything", "people think i'm weak"},
       {"terrified", "helpless", "on edge", "embarrassed"},
       {"the fear is running your life", "you'll lose control in public",
        "you're missing the things that matter to you", "people see you as fragile"},
       {"practice deep breathing", "see a therapist for anxiety", "try going out for a short time",
        "write down your worries", "cut back on caffeine", "ask your doctor about treatment"},
       {"when did the panic attacks start", "what happens right before you panic",
        "where do you feel safest", "how often does this happen"}},
  };
  return t;
}

}  // namespace verve::corpus::synth
